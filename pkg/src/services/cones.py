"""Membership and order tests for the half-space cone K"""

from typing import Sequence

from src.core.errors import MismatchedGenerator
from src.core.logger import setup_logger
from src.models.cone import DualRay, HalfSpaceCone
from src.models.report import BidualReport
from src.models.vectors import TruncatedVector
from src.services.sequence_spaces import pair

logger = setup_logger("Cones")


def _slack(cone: HalfSpaceCone, y: TruncatedVector):
    if cone.tolerance == 0:
        return 0
    scale = cone.generator.l1_norm() * y.sup_norm()
    return cone.tolerance * max(1, scale)


def member(cone: HalfSpaceCone, y: TruncatedVector) -> bool:
    """y in K iff generator(y) >= -tolerance (the boundary counts as inside)"""
    return pair(cone.generator, y) >= -_slack(cone, y)


def dominates(cone: HalfSpaceCone, lower: TruncatedVector, upper: TruncatedVector) -> bool:
    """lower <=_K upper"""
    return member(cone, upper - lower)


def bidual_spot_check(cone: HalfSpaceCone, ray: DualRay,
                      samples: Sequence[TruncatedVector]) -> BidualReport:
    """Compare membership with nonnegativity of sampled dual-ray pairings

    Raises:
        MismatchedGenerator: ray and cone are generated by different functionals
    """
    if ray.generator != cone.generator:
        raise MismatchedGenerator("Dual ray generator differs from the cone generator")

    counterexamples = []
    for y in samples:
        value = pair(cone.generator, y)
        slack = _slack(cone, y)
        dual_side = all(scale * value >= -scale * slack for scale in ray.sample_scales)
        if member(cone, y) != dual_side:
            counterexamples.append(y)

    if counterexamples:
        logger.warning(f"Bidual check found {len(counterexamples)} counterexamples")
    return BidualReport(
        passed=not counterexamples,
        checked=len(samples),
        counterexamples=counterexamples,
    )


def non_pointed_witness(cone: HalfSpaceCone) -> TruncatedVector:
    """Nonzero y with generator(y) = 0, so that both y and -y lie in K"""
    f1 = cone.generator.coefficient(0)
    f2 = cone.generator.coefficient(1)
    if f1 == 0:
        return TruncatedVector((1,))
    if f2 == 0:
        return TruncatedVector((0, 1))
    return TruncatedVector((f2, -f1))
