"""Tests for the K-convex ray mapping and its divergent difference quotients"""

import unittest
from fractions import Fraction

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.core.errors import BelowDepth, DepthExhausted, InvalidSpec, OutsideDomain, TooShort
from src.models.interpolant import CaseKind
from src.models.mapping import CounterexampleOptions, HalfSpaceHost
from src.models.vectors import FamilyKind, FamilySpec, TruncatedVector
from src.services.divergence import (
    CounterexampleBuilder,
    MappingVerifier,
    assert_divergence,
    build_counterexample,
    default_samples,
    divergence_report,
    eval_extended,
    eval_F,
    expected_gap,
    extend_to_halfspace,
    extension_consistency,
    interpolant_of,
    linear_control,
    node_identity,
    quotient_monotonicity,
    quotient_trace,
    ray_monotonicity,
    scalarization_identity,
    verify_K_convexity,
)
from src.services.convex_construction import eval_g
from src.services.sequence_spaces import canonical_probe, decreasing_probe, pair
from src.utils.sampling import log_spaced
from src.utils.scalars import FLOAT64, RATIONAL

F = Fraction
PARTIAL_SUMS = FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 8)


def case4(depth=4, **kwargs):
    """Canonical probe rescaled to 1/2, IncrLow with q = 1/4"""
    options = CounterexampleOptions(q=F(1, 4), depth=depth, **kwargs)
    return build_counterexample(PARTIAL_SUMS, canonical_probe(), options)


def case1(depth=4):
    """Decreasing probe, limit 1/2 without rescaling"""
    return build_counterexample(PARTIAL_SUMS, decreasing_probe(), CounterexampleOptions(depth=depth))


class TestBuildCounterexample(unittest.TestCase):
    """Test case assignment and node construction"""

    def test_canonical_probe_is_increasing_low(self):
        """Canonical probe rescaled by 1/2 gives IncrLow"""
        cone, mapping = case4()
        self.assertEqual(mapping.case.kind, CaseKind.INCR_LOW)
        self.assertEqual(mapping.plan.scale_c, F(1, 2))
        self.assertEqual(mapping.knots_t[:2], (F(1), F(4, 9)))
        self.assertEqual(mapping.plan.values_a[:2], (F(-1), F(-2, 3)))
        self.assertEqual(cone.generator, canonical_probe().scaled(F(1, 2)))
        self.assertEqual(mapping.raw_probe, canonical_probe())

    def test_nodes_follow_the_case_factor(self):
        """v_k = kappa * t_k * y_{m_k}, kappa = -1/q"""
        _, mapping = case4()
        self.assertEqual(mapping.node_vectors[0], TruncatedVector((F(-4),)))
        self.assertEqual(mapping.node_vectors[1], TruncatedVector((F(-16, 9),) * 2))
        self.assertTrue(node_identity(mapping).passed)

    def test_decreasing_probe_is_nonincreasing_low(self):
        """Values 1/2 + 2^-(m+1) need no rescaling"""
        _, mapping = case1()
        self.assertEqual(mapping.case.kind, CaseKind.NONINC_LOW)
        self.assertEqual(mapping.plan.scale_c, 1)
        self.assertEqual(mapping.plan.sub_indices[:2], (1, 2))
        self.assertEqual(mapping.knots_t[0], F(3, 4))
        self.assertTrue(node_identity(mapping).passed)

    def test_target_above_one(self):
        """target_z = 2 gives NonincHigh (q = 4) or IncrHigh"""
        options = CounterexampleOptions(target_z=F(2), depth=3)
        _, high = build_counterexample(PARTIAL_SUMS, decreasing_probe(), options)
        self.assertEqual(high.case.kind, CaseKind.NONINC_HIGH)
        self.assertEqual(high.case.q, F(4))
        _, incr = build_counterexample(PARTIAL_SUMS, canonical_probe(), options)
        self.assertEqual(incr.case.kind, CaseKind.INCR_HIGH)
        self.assertTrue(node_identity(high).passed)
        self.assertTrue(node_identity(incr).passed)

    def test_depth_below_two(self):
        """At least two knots are required"""
        with self.assertRaises(DepthExhausted):
            build_counterexample(PARTIAL_SUMS, canonical_probe(), CounterexampleOptions(depth=1))

    def test_explicit_family_cannot_grow(self):
        """A fixed family that runs out raises DepthExhausted"""
        vectors = tuple(TruncatedVector((F(1),) * m) for m in range(1, 5))
        family = FamilySpec(FamilyKind.EXPLICIT, 4, vectors)
        with self.assertRaises(DepthExhausted):
            build_counterexample(family, canonical_probe(), CounterexampleOptions(depth=8))


class TestCounterexampleBuilder(unittest.TestCase):
    """Test the state a builder keeps between builds"""

    def test_pairings_and_knots_are_kept(self):
        """A second build reuses the stored pairings and the exact knots"""
        builder = CounterexampleBuilder(PARTIAL_SUMS, canonical_probe())
        _, first = builder.build(CounterexampleOptions(q=F(1, 4), depth=6))
        supply = len(builder.values)
        self.assertGreaterEqual(supply, 32)
        self.assertGreaterEqual(len(builder.knot_cache), 6)

        _, second = builder.build(CounterexampleOptions(q=F(1, 4), depth=6))
        self.assertEqual(len(builder.values), supply)
        self.assertEqual(second.plan.sub_indices, first.plan.sub_indices)
        for left, right in zip(first.knots_t, second.knots_t):
            self.assertIs(left, right)

    def test_same_plan_as_a_fresh_build(self):
        """Kept state does not change the result"""
        builder = CounterexampleBuilder(PARTIAL_SUMS, canonical_probe())
        builder.build(CounterexampleOptions(q=F(1, 4), depth=3))
        _, reused = builder.build(CounterexampleOptions(q=F(1, 4), depth=6))
        _, fresh = case4(depth=6)
        self.assertEqual(reused.plan, fresh.plan)
        self.assertEqual(reused.node_vectors, fresh.node_vectors)

    def test_interpolant_lives_on_the_mapping(self):
        """g is built with the mapping and returned as is"""
        _, mapping = case4()
        self.assertIsNotNone(mapping.interpolant)
        self.assertEqual(mapping.interpolant.knots, mapping.knots_t)
        self.assertIs(interpolant_of(mapping), mapping.interpolant)


class TestMappingVerifier(unittest.TestCase):
    """Test check selection by name"""

    def test_named_checks(self):
        """Selected names map to runnable checks; convexity keeps its full report"""
        cone, mapping = case4()
        verifier = MappingVerifier(mapping, cone)
        checks = verifier.checks(["nodes", "convexity"], trials=5, seed=1, gap_floor=F(4))
        self.assertEqual(list(checks), ["nodes", "convexity"])
        self.assertTrue(checks["nodes"]().passed)
        self.assertIsNone(verifier.convexity)
        reports = checks["convexity"]()
        self.assertEqual(len(reports), 3)
        self.assertEqual(verifier.convexity.trials, 5)

    def test_unknown_check(self):
        """An unknown name is rejected before anything runs"""
        cone, mapping = case4(depth=3)
        with self.assertRaises(InvalidSpec):
            MappingVerifier(mapping, cone).checks(["speed"], trials=5, seed=1, gap_floor=F(4))


class TestEvalF(unittest.TestCase):
    """Test evaluation along the ray"""

    def setUp(self):
        self.cone, self.mapping = case4()

    def test_origin_and_knots(self):
        """F(0) = 0 and F(t_k h) = v_k"""
        self.assertEqual(eval_F(self.mapping, 0), TruncatedVector.zero())
        for t, v in zip(self.mapping.knots_t, self.mapping.node_vectors):
            self.assertEqual(eval_F(self.mapping, t), v)

    def test_scalarization_matches_g(self):
        """y*(F(r h)) = g(r) on knots and log-spaced samples"""
        samples = default_samples(self.mapping, count=20)
        report = scalarization_identity(self.mapping, self.cone, samples)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, len(samples))
        r = F(3, 2)
        self.assertEqual(pair(self.cone.generator, eval_F(self.mapping, r)),
                         eval_g(interpolant_of(self.mapping), r))

    def test_domain_errors(self):
        """Negative r is outside the domain; tiny r is below depth"""
        with self.assertRaises(OutsideDomain):
            eval_F(self.mapping, F(-1))
        with self.assertRaises(BelowDepth):
            eval_F(self.mapping, self.mapping.smallest_knot / 2)

    def test_lazy_deepening(self):
        """max_depth lets evaluation below the deepest knot rebuild deeper"""
        _, deep = case4(depth=8)
        _, lazy = case4(depth=4, max_depth=8)
        r = deep.knots_t[5]
        self.assertEqual(eval_F(lazy, r), deep.node_vectors[5])
        self.assertEqual(lazy.depth, 8)
        self.assertEqual(lazy.plan.sub_indices, deep.plan.sub_indices)
        self.assertEqual(interpolant_of(lazy).knots, deep.knots_t)

    def test_evaluations_are_memoized(self):
        """Repeated evaluation returns the stored vector; new nodes clear the store"""
        _, mapping = case4(depth=4, max_depth=8)
        r = (mapping.knots_t[0] + mapping.knots_t[1]) / 2
        first = eval_F(mapping, r)
        self.assertIs(eval_F(mapping, r), first)
        self.assertIn(r, mapping.evaluations)

        eval_F(mapping, mapping.smallest_knot / 2)
        self.assertEqual(mapping.depth, 8)
        self.assertNotIn(r, mapping.evaluations)
        self.assertEqual(eval_F(mapping, r), first)


class TestConvexity(unittest.TestCase):
    """Test the three K-convexity checks"""

    def test_case4_is_K_convex(self):
        """Direct, scalarized and epigraph checks pass"""
        cone, mapping = case4()
        report = verify_K_convexity(mapping, cone, trials=25, seed=7)
        self.assertTrue(report.passed)
        self.assertEqual(report.direct.checked, 25 * 5)
        self.assertEqual([c.name for c in report.checks],
                         ["convexity_direct", "convexity_scalarized", "convexity_epigraph"])

    def test_case1_is_K_convex(self):
        """The nonincreasing case passes as well"""
        cone, mapping = case1()
        self.assertTrue(verify_K_convexity(mapping, cone, trials=25, seed=3).passed)

    def test_same_seed_same_report(self):
        """Seeded sampling is reproducible"""
        cone, mapping = case4(depth=3)
        first = verify_K_convexity(mapping, cone, trials=10, seed=11).to_dict()
        second = verify_K_convexity(mapping, cone, trials=10, seed=11).to_dict()
        self.assertEqual(first, second)

    def test_trials_must_be_positive(self):
        """Zero trials is rejected"""
        cone, mapping = case4(depth=3)
        with self.assertRaises(InvalidSpec):
            verify_K_convexity(mapping, cone, trials=0)

    def test_float_mapping(self):
        """float64 construction passes node, scalarization and convexity checks"""
        options = CounterexampleOptions(target_z=0.5, q=0.25, depth=4)
        cone, mapping = build_counterexample(PARTIAL_SUMS, canonical_probe(FLOAT64), options, FLOAT64)
        self.assertIsInstance(mapping.smallest_knot, float)
        self.assertTrue(node_identity(mapping).passed)
        self.assertTrue(scalarization_identity(mapping, cone, default_samples(mapping, 20)).passed)
        self.assertTrue(verify_K_convexity(mapping, cone, trials=20).passed)


class TestDivergence(unittest.TestCase):
    """Test the difference quotients at the origin"""

    def test_pairwise_gap_is_node_factor(self):
        """Every quotient pair is |kappa| = 1/q apart"""
        cone, mapping = case4(depth=5)
        trace = quotient_trace(mapping, cone)
        self.assertEqual(len(trace), 5)
        self.assertEqual(expected_gap(mapping), 4)
        self.assertTrue(all(trace.gap(i, j) == 4 for i in range(5) for j in range(5) if i != j))
        self.assertTrue(assert_divergence(trace, expected_gap(mapping)))
        self.assertFalse(assert_divergence(trace, F(5)))
        self.assertTrue(divergence_report(trace, F(4)).passed)
        self.assertFalse(divergence_report(trace, F(5)).passed)

    def test_scalarized_quotients(self):
        """y*(q(t_k)) = kappa * z_{m_k}"""
        cone, mapping = case4(depth=3)
        trace = quotient_trace(mapping, cone, ks=[1, 2])
        self.assertEqual(trace.scalarized, (F(-1), F(-3, 2)))
        rows = trace.csv_rows()
        self.assertEqual(rows[0], ["k", "m_k", "t_k", "scalarized", "gap_to_previous"])
        self.assertEqual(rows[2], ["2", "2", "4/9", "-3/2", "4"])

    def test_linear_control_converges(self):
        """F(r h) = r v has equal quotients, so no divergence"""
        v = TruncatedVector((F(1), F(1)))
        trace = linear_control(v, [F(1), F(1, 2), F(1, 4)])
        self.assertTrue(all(q == v for q in trace.quotients))
        self.assertFalse(assert_divergence(trace, F(1)))
        with self.assertRaises(TooShort):
            assert_divergence(linear_control(v, [F(1)]), F(1))

    def test_gap_floor_must_be_positive(self):
        """A zero floor is meaningless"""
        cone, mapping = case4(depth=3)
        with self.assertRaises(InvalidSpec):
            assert_divergence(quotient_trace(mapping, cone), F(0))

    def test_knot_numbers_are_checked(self):
        """ks outside 1..depth are rejected"""
        cone, mapping = case4(depth=3)
        with self.assertRaises(InvalidSpec):
            quotient_trace(mapping, cone, ks=[0])


class TestMonotonicity(unittest.TestCase):
    """Test the ordering of quotients and of F along the ray"""

    def test_quotients_nondecreasing_in_t(self):
        """y*(q(t)) increases with t in both directions of the family"""
        for cone, mapping in (case4(), case1()):
            report = quotient_monotonicity(mapping, cone)
            self.assertTrue(report.passed)
            self.assertGreater(report.checked, 0)

    def test_ray_order_in_nonincreasing_cases(self):
        """Case 1: F(w1 h) <=_K F(w2 h) for w1 < w2"""
        cone, mapping = case1()
        report = ray_monotonicity(mapping, cone)
        self.assertTrue(report.details["applicable"])
        self.assertTrue(report.passed)

    def test_ray_order_not_applicable_in_increasing_cases(self):
        """Case 4 reports the check as not applicable"""
        cone, mapping = case4()
        report = ray_monotonicity(mapping, cone)
        self.assertFalse(report.details["applicable"])
        self.assertEqual(report.checked, 0)


class TestHalfSpaceExtension(unittest.TestCase):
    """Test the extension F-bar(x) = F(<x, h>)"""

    def setUp(self):
        self.cone, self.mapping = case4()
        self.host = HalfSpaceHost(3, (F(3, 5), F(4, 5), F(0)))
        self.extended = extend_to_halfspace(self.mapping, self.host)

    def test_ray_and_orthogonal_consistency(self):
        """F-bar agrees with F on the ray and vanishes on h-perp"""
        ts = log_spaced(self.mapping.knots_t[-2], 2 * self.mapping.knots_t[0], 10, RATIONAL)
        report = extension_consistency(self.extended, ts, seed=5)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 20)

    def test_outside_halfspace(self):
        """<x, h> < 0 raises OutsideDomain"""
        with self.assertRaises(OutsideDomain):
            eval_extended(self.extended, (F(-1), F(0), F(0)))
        self.assertEqual(eval_extended(self.extended, (F(4), F(-3), F(7))), TruncatedVector.zero())

    def test_extended_is_K_convex(self):
        """Half-space samples pass all three convexity checks"""
        self.assertTrue(verify_K_convexity(self.extended, self.cone, trials=20, seed=2).passed)

    def test_host_validation(self):
        """h must have unit norm and the right dimension"""
        with self.assertRaises(InvalidSpec):
            HalfSpaceHost(2, (F(1), F(1)))
        with self.assertRaises(InvalidSpec):
            HalfSpaceHost(3, (F(1), F(0)))
        host = HalfSpaceHost.axis(4)
        self.assertTrue(host.contains((F(0), F(-5), F(1), F(2))))
        self.assertEqual(HalfSpaceHost.from_dict(self.host.to_dict()), self.host)


if __name__ == "__main__":
    unittest.main()
