"""Full-size runs of the four cases: depth-12 plans, 1000-trial convexity and the 5-dimensional extension"""

import time
import unittest
from fractions import Fraction

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models.interpolant import CaseKind, InterpolationPlan
from src.models.mapping import CounterexampleOptions, HalfSpaceHost
from src.models.vectors import FamilyKind, FamilySpec
from src.services.convex_construction import check_slope_chain, interpolation_report, slope_chain_report
from src.services.divergence import (
    build_counterexample,
    default_samples,
    divergence_report,
    expected_gap,
    extend_to_halfspace,
    extension_consistency,
    interpolant_of,
    node_identity,
    quotient_monotonicity,
    quotient_trace,
    ray_monotonicity,
    scalarization_identity,
    verify_K_convexity,
)
from src.services.sequence_spaces import canonical_probe, decreasing_probe
from src.utils.sampling import log_spaced
from src.utils.scalars import RATIONAL

F = Fraction
PARTIAL_SUMS = FamilySpec(FamilyKind.C0_PARTIAL_SUMS, 32)

# Seconds allowed for one depth-12 build
BUILD_SECONDS = 30


class FullSizeCase:
    """Shared checks; subclasses name the probe and options of one case"""

    kind: CaseKind
    probe = staticmethod(canonical_probe)
    target_z = F(1, 2)
    q = None

    @classmethod
    def options(cls, depth: int) -> CounterexampleOptions:
        return CounterexampleOptions(target_z=cls.target_z, q=cls.q, depth=depth, case=cls.kind)

    @classmethod
    def setUpClass(cls):
        started = time.perf_counter()
        cls.cone, cls.mapping = build_counterexample(PARTIAL_SUMS, cls.probe(), cls.options(12))
        cls.build_seconds = time.perf_counter() - started
        cls.cone8, cls.mapping8 = build_counterexample(PARTIAL_SUMS, cls.probe(), cls.options(8))

    def test_depth_twelve_plan(self):
        """Twelve knots in the expected case, built in bounded time"""
        self.assertEqual(self.mapping.case.kind, self.kind)
        self.assertEqual(self.mapping.depth, 12)
        self.assertLess(self.build_seconds, BUILD_SECONDS)
        self.assertEqual(list(self.mapping.plan.sub_indices), sorted(set(self.mapping.plan.sub_indices)))

    def test_slope_chain_is_exact(self):
        """Slopes strictly increase across all twelve knots"""
        plan = self.mapping.plan
        self.assertTrue(check_slope_chain(plan.knots_t, plan.values_a))
        self.assertTrue(slope_chain_report(plan.knots_t, plan.values_a).passed)
        self.assertTrue(interpolation_report(interpolant_of(self.mapping)).passed)

    def test_plan_serializes(self):
        """Deep exact knots survive to_dict and from_dict"""
        plan = self.mapping.plan
        self.assertEqual(InterpolationPlan.from_dict(plan.to_dict(), RATIONAL), plan)
        self.assertEqual(len(plan.csv_rows()), 13)

    def test_nodes_and_scalarization(self):
        """F hits the nodes and y*(F(r h)) = g(r) at depth 12"""
        self.assertTrue(node_identity(self.mapping).passed)
        samples = default_samples(self.mapping)
        report = scalarization_identity(self.mapping, self.cone, samples)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, len(samples))

    def test_divergence(self):
        """Quotients at the twelve knots stay |kappa| apart"""
        trace = quotient_trace(self.mapping, self.cone)
        self.assertEqual(len(trace), 12)
        self.assertTrue(divergence_report(trace, expected_gap(self.mapping)).passed)

    def test_monotonicity(self):
        """Quotients are K-nondecreasing in t; the ray order holds where it applies"""
        self.assertTrue(quotient_monotonicity(self.mapping, self.cone).passed)
        report = ray_monotonicity(self.mapping, self.cone)
        self.assertTrue(report.passed)
        self.assertEqual(report.details["applicable"], self.kind.nonincreasing)

    def test_convexity_at_depth_eight(self):
        """1000 seeded trials pass all three K-convexity checks"""
        report = verify_K_convexity(self.mapping8, self.cone8, trials=1000, seed=0)
        self.assertTrue(report.passed, [c.violations[:3] for c in report.checks])
        self.assertEqual(report.trials, 1000)

    def test_extension_in_five_dimensions(self):
        """The half-space extension agrees on 50 ray points and stays K-convex"""
        extended = extend_to_halfspace(self.mapping8, HalfSpaceHost.axis(5))
        knots = self.mapping8.knots_t
        ts = log_spaced(knots[-2], 2 * knots[0], 50, RATIONAL)
        consistency = extension_consistency(extended, ts, seed=0)
        self.assertTrue(consistency.passed)
        self.assertEqual(consistency.checked, 100)
        self.assertTrue(verify_K_convexity(extended, self.cone8, trials=1000, seed=0).passed)


class TestNonincreasingLow(FullSizeCase, unittest.TestCase):
    """Decreasing probe, limit 1/2"""
    kind = CaseKind.NONINC_LOW
    probe = staticmethod(decreasing_probe)


class TestNonincreasingHigh(FullSizeCase, unittest.TestCase):
    """Decreasing probe rescaled to limit 2, q = 4"""
    kind = CaseKind.NONINC_HIGH
    probe = staticmethod(decreasing_probe)
    target_z = F(2)
    q = F(4)


class TestIncreasingHigh(FullSizeCase, unittest.TestCase):
    """Canonical probe rescaled to limit 2"""
    kind = CaseKind.INCR_HIGH
    target_z = F(2)


class TestIncreasingLow(FullSizeCase, unittest.TestCase):
    """Canonical probe rescaled to limit 1/2, q = 1/4"""
    kind = CaseKind.INCR_LOW
    q = F(1, 4)


if __name__ == "__main__":
    unittest.main()
