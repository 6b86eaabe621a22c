"""Tests for the half-space cone, its dual ray and the order it induces"""

import unittest
from fractions import Fraction

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.core.errors import InvalidSpec, MismatchedGenerator
from src.models.cone import DualRay, HalfSpaceCone
from src.models.vectors import DualFunctional, TruncatedVector
from src.services.cones import bidual_spot_check, dominates, member, non_pointed_witness
from src.services.sequence_spaces import canonical_probe, decreasing_probe, pair
from src.utils.scalars import FLOAT64, FLOAT_ORDER_TOLERANCE


def vec(*coords):
    return TruncatedVector(tuple(Fraction(c) for c in coords))


class TestHalfSpaceCone(unittest.TestCase):
    """Test membership in K = {y : y*(y) >= 0}"""

    def setUp(self):
        """Cone generated by the canonical probe"""
        self.cone = HalfSpaceCone(canonical_probe())

    def test_boundary_is_inside(self):
        """generator(y) = 0 counts as a member"""
        y = vec(1, -2)
        self.assertEqual(pair(self.cone.generator, y), 0)
        self.assertTrue(member(self.cone, y))

    def test_membership_sign(self):
        """Positive pairings are in K, negative ones are not"""
        self.assertTrue(member(self.cone, vec(1)))
        self.assertFalse(member(self.cone, vec(-1)))
        self.assertTrue(member(self.cone, TruncatedVector.zero()))

    def test_dominates_is_membership_of_the_difference(self):
        """lower <=_K upper iff upper - lower in K"""
        self.assertTrue(dominates(self.cone, vec(0), vec(1)))
        self.assertFalse(dominates(self.cone, vec(1), vec(0)))
        self.assertTrue(dominates(self.cone, vec(3), vec(3)))

    def test_negative_tolerance_rejected(self):
        """Cone tolerance must be nonnegative"""
        with self.assertRaises(InvalidSpec):
            HalfSpaceCone(canonical_probe(), Fraction(-1))

    def test_float_tolerance_admits_rounding(self):
        """A pairing a hair below zero still counts in float mode"""
        cone = HalfSpaceCone(canonical_probe(FLOAT64), FLOAT_ORDER_TOLERANCE)
        y = TruncatedVector((-1e-15,))
        self.assertTrue(member(cone, y))
        self.assertFalse(member(cone, TruncatedVector((-1e-3,))))

    def test_dict_roundtrip(self):
        """to_dict / from_dict preserve generator and tolerance"""
        self.assertEqual(HalfSpaceCone.from_dict(self.cone.to_dict()), self.cone)
        with self.assertRaises(InvalidSpec):
            HalfSpaceCone.from_dict({"tolerance": "0"})


class TestNonPointedWitness(unittest.TestCase):
    """Test that K contains a line"""

    def test_witness_and_negation_are_members(self):
        """y != 0 with y and -y in K"""
        for probe in (canonical_probe(), decreasing_probe()):
            cone = HalfSpaceCone(probe)
            y = non_pointed_witness(cone)
            self.assertNotEqual(y, TruncatedVector.zero())
            self.assertEqual(pair(probe, y), 0)
            self.assertTrue(member(cone, y))
            self.assertTrue(member(cone, -y))

    def test_zero_leading_coefficients(self):
        """Zero first or second coefficient uses a unit vector"""
        cone = HalfSpaceCone(DualFunctional((0, Fraction(1))))
        self.assertEqual(non_pointed_witness(cone), vec(1))
        cone = HalfSpaceCone(DualFunctional((Fraction(1),)))
        self.assertEqual(non_pointed_witness(cone), vec(0, 1))


class TestBidual(unittest.TestCase):
    """Test the sampled bidual representation of K"""

    def test_membership_agrees_with_dual_ray(self):
        """Sampled vectors agree on both sides"""
        cone = HalfSpaceCone(canonical_probe())
        ray = DualRay(canonical_probe())
        samples = [vec(1), vec(-1), vec(1, -2), vec(0, 0, 5), vec(-1, 1, 1)]
        report = bidual_spot_check(cone, ray, samples)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 5)
        self.assertEqual(report.counterexamples, [])

    def test_mismatched_generator(self):
        """A ray generated by another functional is rejected"""
        cone = HalfSpaceCone(canonical_probe())
        with self.assertRaises(MismatchedGenerator):
            bidual_spot_check(cone, DualRay(decreasing_probe()), [vec(1)])

    def test_negative_scale_rejected(self):
        """Dual ray scales are nonnegative"""
        with self.assertRaises(InvalidSpec):
            DualRay(canonical_probe(), (Fraction(-1),))


if __name__ == "__main__":
    unittest.main()
