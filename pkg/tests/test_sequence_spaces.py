"""Tests for truncated vectors, l1 pairings and weak Cauchy scans"""

import unittest
from fractions import Fraction

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.core.errors import EmptyFamily, InvalidSpec
from src.models.vectors import (
    DualFunctional,
    FamilyKind,
    FamilySpec,
    SpaceTag,
    TailRule,
    TruncatedVector,
)
from src.services.sequence_spaces import (
    canonical_probe,
    closed_form_limit,
    decreasing_probe,
    extrapolate_limit,
    family_member,
    family_values,
    generate_family,
    LinfDemo,
    infimum_gap_demo,
    linf_monotonicity,
    pair,
    weak_cauchy_scan,
)
from src.utils.scalars import FLOAT64, RATIONAL


class TestTruncatedVector(unittest.TestCase):
    """Test the finitely supported vector model"""

    def test_trailing_zeros_are_stripped(self):
        """Two windows of the same element compare equal"""
        self.assertEqual(
            TruncatedVector((Fraction(1), Fraction(2), 0, 0)),
            TruncatedVector((Fraction(1), Fraction(2))),
        )
        self.assertEqual(len(TruncatedVector((0, 0, 0))), 0)

    def test_coordinate_beyond_support_is_zero(self):
        """Coordinates past the stored prefix read as 0"""
        y = TruncatedVector((Fraction(3),))
        self.assertEqual(y.coordinate(0), 3)
        self.assertEqual(y.coordinate(10), 0)

    def test_combine_and_scale(self):
        """alpha * x + beta * y coordinate-wise"""
        x = TruncatedVector((Fraction(1), Fraction(2)))
        y = TruncatedVector((Fraction(1, 2),))
        self.assertEqual(x.combine(2, y, 4), TruncatedVector((Fraction(4), Fraction(4))))
        self.assertEqual(x.scale(Fraction(1, 2)), TruncatedVector((Fraction(1, 2), Fraction(1))))
        self.assertEqual(x - x, TruncatedVector.zero())

    def test_sup_norm(self):
        """Largest absolute coordinate, 0 for the zero vector"""
        self.assertEqual(TruncatedVector((Fraction(1), Fraction(-3), Fraction(2))).sup_norm(), 3)
        self.assertEqual(TruncatedVector.zero().sup_norm(), 0)

    def test_list_roundtrip_keeps_rationals(self):
        """Vectors serialize as p/q strings"""
        y = TruncatedVector.from_list(["1/3", "2", "0.25"])
        self.assertEqual(y.to_list(), ["1/3", "2", "1/4"])


class TestDualFunctional(unittest.TestCase):
    """Test l1 functionals with geometric tails"""

    def test_canonical_probe_coefficients(self):
        """Coefficients are 2^-i"""
        probe = canonical_probe()
        self.assertEqual(list(probe.coefficients(6)), [Fraction(1, 2 ** i) for i in range(1, 7)])
        self.assertEqual(probe.coefficient(9), Fraction(1, 2 ** 10))

    def test_closed_form_sums(self):
        """The canonical probe sums to 1; the decreasing probe to 1/2"""
        self.assertEqual(canonical_probe().coefficient_sum(), 1)
        self.assertEqual(canonical_probe().l1_norm(), 1)
        self.assertEqual(decreasing_probe().coefficient_sum(), Fraction(1, 2))
        self.assertEqual(decreasing_probe().l1_norm(), 1)

    def test_scaled_scales_head_and_tail(self):
        """c * probe multiplies every coefficient"""
        scaled = canonical_probe().scaled(Fraction(1, 2))
        self.assertEqual(list(scaled.coefficients(5)), [Fraction(1, 2 ** (i + 1)) for i in range(1, 6)])

    def test_partial_sums(self):
        """Sums of coefficient ranges match the coefficients, past any cached length"""
        probe = canonical_probe()
        self.assertEqual(probe.partial_sum(0, 3), Fraction(7, 8))
        self.assertEqual(probe.partial_sum(4, 4), 0)
        self.assertEqual(probe.partial_sum(2, 50), sum(list(probe.coefficients(50))[2:]))
        self.assertEqual(probe.partial_sum(0, 300), 1 - Fraction(1, 2 ** 300))
        self.assertEqual(decreasing_probe().partial_sum(0, 2), Fraction(5, 8))

    def test_geometric_tail_needs_ratio_below_one(self):
        """A divergent tail is rejected"""
        with self.assertRaises(InvalidSpec):
            TailRule.geometric(Fraction(1), Fraction(1))

    def test_dict_roundtrip(self):
        """to_dict / from_dict preserve the functional"""
        probe = decreasing_probe()
        self.assertEqual(DualFunctional.from_dict(probe.to_dict()), probe)

    def test_unknown_tail_rule(self):
        """Unknown rules raise InvalidSpec"""
        with self.assertRaises(InvalidSpec):
            DualFunctional.from_dict({"head": ["1"], "tail": {"rule": "harmonic"}})


class TestFamilies(unittest.TestCase):
    """Test canonical families and their pairings"""

    def test_partial_sum_family(self):
        """y_m has m leading ones"""
        family = generate_family(FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 4))
        self.assertEqual(len(family), 4)
        self.assertEqual(family[2], TruncatedVector((Fraction(1),) * 3))
        self.assertEqual(family_member(FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 4), 3), family[2])

    def test_empty_family_raises(self):
        """Depth zero has no members"""
        with self.assertRaises(EmptyFamily):
            generate_family(FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 0))

    def test_explicit_family_needs_enough_vectors(self):
        """Depth beyond the supplied vectors is rejected"""
        with self.assertRaises(InvalidSpec):
            FamilySpec(FamilyKind.EXPLICIT, 3, (TruncatedVector((Fraction(1),)),))

    def test_family_values_match_pairings(self):
        """Running sums equal pair(f, y_m)"""
        spec = FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 10)
        probe = canonical_probe()
        expected = [pair(probe, y) for y in generate_family(spec)]
        self.assertEqual(family_values(spec, probe), expected)
        self.assertEqual(expected[2], Fraction(7, 8))

    def test_pairing_over_runs(self):
        """Shared, equal and zero coordinates all pair like the plain sum"""
        probe = decreasing_probe()
        third = Fraction(1, 3)
        y = TruncatedVector((third, third, Fraction(1, 3), 0, Fraction(-2), third))
        expected = sum(probe.coefficient(i) * y.coordinate(i) for i in range(len(y)))
        self.assertEqual(pair(probe, y), expected)
        floats = TruncatedVector(tuple(float(c) for c in y.coords))
        self.assertAlmostEqual(pair(decreasing_probe(FLOAT64), floats), float(expected), places=12)

    def test_family_values_resume(self):
        """Known pairings are extended, not recomputed"""
        probe = canonical_probe()
        for kind in (FamilyKind.C0_PARTIAL_SUMS, FamilyKind.LINF_NEG_PREFIX):
            short = family_values(FamilySpec(kind, 10), probe)
            full = family_values(FamilySpec(kind, 40), probe)
            self.assertEqual(family_values(FamilySpec(kind, 40), probe, known=short), full)

        vectors = tuple(TruncatedVector((Fraction(m),) * m) for m in range(1, 6))
        explicit = FamilySpec(FamilyKind.EXPLICIT, 5, vectors)
        known = family_values(explicit.with_depth(2), probe)
        self.assertEqual(family_values(explicit, probe, known=known), family_values(explicit, probe))

    def test_decreasing_probe_values(self):
        """Partial sums of the decreasing probe are 1/2 + 2^-(m+1)"""
        values = family_values(FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 8), decreasing_probe())
        self.assertEqual(values, [Fraction(1, 2) + Fraction(1, 2 ** (m + 1)) for m in range(1, 9)])

    def test_linf_family_values_are_negated(self):
        """Negative prefixes pair to minus the running sums"""
        spec = FamilySpec(FamilyKind.LINF_NEG_PREFIX, 3)
        self.assertEqual(family_values(spec, canonical_probe()),
                         [Fraction(-1, 2), Fraction(-3, 4), Fraction(-7, 8)])
        self.assertEqual(closed_form_limit(spec, canonical_probe()), -1)

    def test_float_backend_pairs_in_floats(self):
        """float64 families pair to floats"""
        values = family_values(FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 3), canonical_probe(FLOAT64), FLOAT64)
        self.assertEqual(values, [0.5, 0.75, 0.875])


class TestLimits(unittest.TestCase):
    """Test limit extrapolation"""

    def test_geometric_extrapolation_is_exact(self):
        """Constant-ratio gaps give the exact geometric limit"""
        values = [Fraction(1) - Fraction(1, 3 ** m) for m in range(1, 8)]
        limit, source = extrapolate_limit(values)
        self.assertEqual(limit, 1)
        self.assertEqual(source, "geometric")

    def test_constant_and_irregular_values(self):
        """Constant tails extrapolate to themselves; irregular gaps give None"""
        self.assertEqual(extrapolate_limit([Fraction(2)] * 4), (2, "constant"))
        limit, source = extrapolate_limit([Fraction(1, m) for m in range(1, 6)])
        self.assertIsNone(limit)
        self.assertEqual(source, "none")


class TestWeakCauchyScan(unittest.TestCase):
    """Test the scan evidence for the c0 partial-sum family"""

    def test_partial_sums_are_a_norm_divergent_candidate(self):
        """Pairwise gaps are 1 and the canonical probe converges to 1"""
        spec = FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 12)
        family = generate_family(spec)
        report = weak_cauchy_scan(family, [canonical_probe(), decreasing_probe()], spec)

        self.assertEqual(report.family_size, 12)
        self.assertEqual(report.min_pairwise_gap, 1)
        self.assertTrue(report.norm_divergent_candidate)
        self.assertEqual(report.probes[0].limit, 1)
        self.assertEqual(report.probes[0].limit_source, "closed_form")
        self.assertEqual(report.probes[1].limit, Fraction(1, 2))
        self.assertEqual(report.probes[0].last_gap, Fraction(1, 2 ** 12))

    def test_scan_without_spec_extrapolates(self):
        """Without a family spec the geometric extrapolation is used"""
        family = generate_family(FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 6))
        report = weak_cauchy_scan(family, [canonical_probe()])
        self.assertEqual(report.probes[0].limit, 1)
        self.assertEqual(report.probes[0].limit_source, "geometric")

    def test_empty_scan_raises(self):
        """An empty family cannot be scanned"""
        with self.assertRaises(EmptyFamily):
            weak_cauchy_scan([], [canonical_probe()])

    def test_report_is_json_ready(self):
        """Scalars serialize as strings"""
        spec = FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 3)
        data = weak_cauchy_scan(generate_family(spec), [canonical_probe()], spec).to_dict()
        self.assertEqual(data["probes"][0]["values"], ["1/2", "3/4", "7/8"])
        self.assertEqual(data["min_pairwise_gap"], "1")


class TestLinfDemo(unittest.TestCase):
    """Test the l-infinity infimum example"""

    def test_distance_to_infimum_stays_one(self):
        """Every x_n is at sup distance 1 from the infimum"""
        self.assertEqual(infimum_gap_demo(20), [1] * 20)

    def test_ordering_facts(self):
        """x_n decrease and stay above the infimum"""
        report = linf_monotonicity(15)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 15)

    def test_demo_reports(self):
        """The demo service reports both facts as passing checks"""
        demo = LinfDemo(12)
        gaps = demo.gaps()
        report = demo.gap_report(gaps)
        self.assertEqual(report.name, "infimum_gap")
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 12)
        self.assertTrue(demo.order_report().passed)
        self.assertFalse(demo.gap_report([1, Fraction(1, 2)]).passed)

    def test_linf_family_is_tagged(self):
        """Members carry the l-infinity tag"""
        family = generate_family(FamilySpec(FamilyKind.LINF_NEG_PREFIX, 2))
        self.assertEqual(family[0].space_tag, SpaceTag.LINF)

    def test_n_max_must_be_positive(self):
        """n_max = 0 is an empty family"""
        with self.assertRaises(EmptyFamily):
            infimum_gap_demo(0, RATIONAL)


if __name__ == "__main__":
    unittest.main()
