"""Seeded samplers and evaluation grids"""

import math
import random
from fractions import Fraction
from typing import List, Sequence

from src.core.errors import InvalidSpec
from src.utils.scalars import Scalar, ScalarBackend, log_magnitude

SEED_MASK = (1 << 64) - 1

# Resolution of random fractions in [0, 1]
UNIT_DENOMINATOR = 1 << 20

# Convex-combination weights tried by the direct K-convexity check
LAMBDA_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def make_rng(seed: int) -> random.Random:
    """Independent generator for a 64-bit seed"""
    return random.Random(seed & SEED_MASK)


def unit_fraction(rng: random.Random, backend: ScalarBackend) -> Scalar:
    """Uniform draw from {0, 1/D, ..., 1}; exact for rationals"""
    return backend.coerce(Fraction(rng.randint(0, UNIT_DENOMINATOR), UNIT_DENOMINATOR))


def uniform_between(rng: random.Random, low: Scalar, high: Scalar, backend: ScalarBackend) -> Scalar:
    return low + (high - low) * unit_fraction(rng, backend)


def small_scalar(rng: random.Random, backend: ScalarBackend, bound: int = 8) -> Scalar:
    """Multiple of 1/bound in [-1, 1]"""
    return backend.coerce(Fraction(rng.randint(-bound, bound), bound))


def piecewise_sample(rng: random.Random, knots: Sequence[Scalar], backend: ScalarBackend) -> Scalar:
    """Point of [t_last, 2 t_1]: pick a knot interval uniformly, then a point inside it

    Knots shrink geometrically, so sampling per interval reaches the deep
    pieces that a uniform draw over the whole range would miss.
    """
    if len(knots) < 2:
        raise InvalidSpec("Need at least two knots to sample from")
    k = rng.randrange(len(knots))
    if k == 0:
        low, high = knots[0], 2 * knots[0]
    else:
        low, high = knots[k], knots[k - 1]
    return uniform_between(rng, low, high, backend)


def interior_points(low: Scalar, high: Scalar, count: int, backend: ScalarBackend) -> List[Scalar]:
    """count equally spaced points strictly inside (low, high)"""
    step = (high - low) / backend.coerce(count + 1)
    return [low + step * j for j in range(1, count + 1)]


def log_spaced(low: Scalar, high: Scalar, count: int, backend: ScalarBackend) -> List[Scalar]:
    """count points uniform in log between low and high, endpoints included

    Rational mode converts each float point exactly and clamps it into
    [low, high], so every point stays inside the covered range.
    """
    if count < 1:
        return []
    if not 0 < low <= high:
        raise InvalidSpec(f"Log grid needs 0 < low <= high, got {low} and {high}")
    if count == 1 or low == high:
        return [high] * count
    log_low, log_high = log_magnitude(low), log_magnitude(high)
    points = []
    for j in range(count):
        if j == 0:
            point = low
        elif j == count - 1:
            point = high
        else:
            value = math.exp(log_low + (log_high - log_low) * j / (count - 1))
            point = min(max(backend.coerce(Fraction(value)), low), high)
        points.append(point)
    return points
