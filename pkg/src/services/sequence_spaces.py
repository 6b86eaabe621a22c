"""Sequence-space truncations, l1 pairings and weak Cauchy scans"""

from itertools import islice
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.errors import EmptyFamily
from src.core.logger import setup_logger
from src.models.report import CheckReport, ProbeScan, ScanReport
from src.models.vectors import (
    DualFunctional,
    FamilyKind,
    FamilySpec,
    SpaceTag,
    TailRule,
    TruncatedVector,
)
from src.utils.scalars import RATIONAL, Scalar, ScalarBackend

logger = setup_logger("SequenceSpaces")


def canonical_probe(backend: ScalarBackend = RATIONAL) -> DualFunctional:
    """Coefficients 2^-i: (1/2, 1/4, 1/8, then a geometric 1/2 tail from 1/16)"""
    half = backend.coerce("1/2")
    return DualFunctional(
        (half, backend.coerce("1/4"), backend.coerce("1/8")),
        TailRule.geometric(half, backend.coerce("1/16")),
    )


def decreasing_probe(backend: ScalarBackend = RATIONAL) -> DualFunctional:
    """Probe whose partial-sum values are 1/2 + 2^-(m+1), decreasing to 1/2"""
    return DualFunctional(
        (backend.coerce("3/4"),),
        TailRule.geometric(backend.coerce("1/2"), backend.coerce("-1/8")),
    )


def pair(f: DualFunctional, y: TruncatedVector) -> Scalar:
    """Evaluate f(y) as a finite sum over the support of y

    Exact coordinates are walked in runs of one shared object, each run
    pairing against a cached partial sum of the coefficients. Float
    coordinates sum their coefficients per object instead.
    """
    coords = y.coords
    if not any(isinstance(c, float) for c in coords):
        total = 0
        start = 0
        while start < len(coords):
            c = coords[start]
            end = start + 1
            while end < len(coords) and coords[end] is c:
                end += 1
            if c != 0:
                total = total + c * f.partial_sum(start, end)
            start = end
        return total

    grouped: Dict[int, List] = {}
    for coefficient, c in zip(f.coefficients(len(y)), y.coords):
        entry = grouped.get(id(c))
        if entry is None:
            grouped[id(c)] = [c, coefficient]
        else:
            entry[1] = entry[1] + coefficient
    total = 0
    for c, weight in grouped.values():
        total = total + c * weight
    return total


def sup_norm(y: TruncatedVector) -> Scalar:
    return y.sup_norm()


def generate_family(spec: FamilySpec, backend: ScalarBackend = RATIONAL) -> List[TruncatedVector]:
    """Members y_1 .. y_depth of a canonical family

    Raises:
        EmptyFamily: depth is zero
    """
    if spec.depth < 1:
        raise EmptyFamily("Family depth must be at least 1")

    if spec.kind is FamilyKind.C0_PARTIAL_SUMS:
        one = backend.one
        return [TruncatedVector.constant_prefix(one, m) for m in range(1, spec.depth + 1)]

    if spec.kind is FamilyKind.LINF_NEG_PREFIX:
        minus_one = -backend.one
        return [
            TruncatedVector.constant_prefix(minus_one, n, SpaceTag.LINF)
            for n in range(1, spec.depth + 1)
        ]

    return list(spec.vectors[:spec.depth])


def family_member(spec: FamilySpec, m: int, backend: ScalarBackend = RATIONAL) -> TruncatedVector:
    """y_m (1-based) without building y_1 .. y_{m-1}"""
    if m < 1:
        raise EmptyFamily(f"Family index must be at least 1, got {m}")
    if spec.kind is FamilyKind.C0_PARTIAL_SUMS:
        return TruncatedVector.constant_prefix(backend.one, m)
    if spec.kind is FamilyKind.LINF_NEG_PREFIX:
        return TruncatedVector.constant_prefix(-backend.one, m, SpaceTag.LINF)
    if m > len(spec.vectors):
        raise EmptyFamily(f"Explicit family has {len(spec.vectors)} vectors, index {m} requested")
    return spec.vectors[m - 1]


def family_values(spec: FamilySpec, probe: DualFunctional,
                  backend: ScalarBackend = RATIONAL,
                  known: Sequence[Scalar] = ()) -> List[Scalar]:
    """Pairings probe(y_1) .. probe(y_depth)

    Partial-sum families pair as running sums of the probe coefficients, so
    large depths avoid materializing every member. `known` holds pairings
    already computed for a shorter supply; only the members after it are
    paired.
    """
    if spec.depth < 1:
        raise EmptyFamily("Family depth must be at least 1")
    known = list(known[:spec.depth])

    if spec.kind in (FamilyKind.C0_PARTIAL_SUMS, FamilyKind.LINF_NEG_PREFIX):
        sign = 1 if spec.kind is FamilyKind.C0_PARTIAL_SUMS else -1
        one = backend.one
        values = known
        running = sign * known[-1] if known else 0
        for coefficient in islice(probe.coefficients(spec.depth), len(known), None):
            running = running + coefficient * one
            values.append(running if sign > 0 else -running)
        return values

    return known + [pair(probe, y) for y in generate_family(spec, backend)[len(known):]]


def closed_form_limit(spec: Optional[FamilySpec], probe: DualFunctional) -> Optional[Scalar]:
    """lim probe(y_m) in closed form for the canonical families, else None"""
    if spec is None:
        return None
    if spec.kind is FamilyKind.C0_PARTIAL_SUMS:
        return probe.coefficient_sum()
    if spec.kind is FamilyKind.LINF_NEG_PREFIX:
        return -probe.coefficient_sum()
    return None


def extrapolate_limit(values: Sequence[Scalar]) -> Tuple[Optional[Scalar], str]:
    """Exact limit when the trailing gaps are zero or exactly geometric"""
    if len(values) == 1:
        return values[0], "single"
    gaps = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    if gaps[-1] == 0 and (len(gaps) < 2 or gaps[-2] == 0):
        return values[-1], "constant"
    if len(gaps) < 2 or gaps[-2] == 0:
        return None, "none"
    ratio = gaps[-1] / gaps[-2]
    if not abs(ratio) < 1:
        return None, "none"
    if len(gaps) >= 3 and (gaps[-3] == 0 or gaps[-2] / gaps[-3] != ratio):
        return None, "none"
    return values[-1] + gaps[-1] * ratio / (1 - ratio), "geometric"


def weak_cauchy_scan(family: Sequence[TruncatedVector], probes: Sequence[DualFunctional],
                     family_spec: Optional[FamilySpec] = None,
                     gap_floor: Scalar = 1) -> ScanReport:
    """Per-probe convergence evidence plus the pairwise norm-gap floor

    Args:
        family: y_1 .. y_n
        probes: functionals to pair with every member
        family_spec: when given for a canonical family, limits use the closed form
        gap_floor: minimum pairwise sup-norm gap that flags a norm-divergent candidate

    Returns:
        ScanReport (evidence only; weak convergence is not decided here)
    """
    if not family:
        raise EmptyFamily("Cannot scan an empty family")

    scans = []
    for probe in probes:
        values = [pair(probe, y) for y in family]
        last_gap = abs(values[-1] - values[-2]) if len(values) >= 2 else None
        limit = closed_form_limit(family_spec, probe)
        source = "closed_form"
        if limit is None or len(values) == 1:
            limit, source = extrapolate_limit(values)
        scans.append(ProbeScan(values, last_gap, limit, source))

    min_gap = None
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            gap = sup_norm(family[i] - family[j])
            if min_gap is None or gap < min_gap:
                min_gap = gap

    candidate = min_gap is not None and min_gap >= gap_floor
    logger.debug(
        f"Scanned {len(family)} vectors with {len(probes)} probes; "
        f"min gap={min_gap}, candidate={candidate}"
    )
    return ScanReport(
        probes=scans,
        family_size=len(family),
        gap_floor=gap_floor,
        min_pairwise_gap=min_gap,
        norm_divergent_candidate=candidate,
    )


def _neg_prefix_family(n_max: int, backend: ScalarBackend) -> Tuple[List[TruncatedVector], TruncatedVector]:
    if n_max < 1:
        raise EmptyFamily("n_max must be at least 1")
    family = generate_family(FamilySpec(FamilyKind.LINF_NEG_PREFIX, n_max), backend)
    floor_vector = TruncatedVector.constant_prefix(-backend.one, n_max + 1, SpaceTag.LINF)
    return family, floor_vector


def infimum_gap_demo(n_max: int, backend: ScalarBackend = RATIONAL) -> List[Scalar]:
    """Distances ||x_n - inf||_inf for the nonincreasing l-infinity family

    The infimum (-1, -1, ...) is truncated to n_max + 1 coordinates; every
    distance is 1 because coordinate n + 1 of x_n is still 0.
    """
    family, infimum = _neg_prefix_family(n_max, backend)
    return [sup_norm(x - infimum) for x in family]


def linf_monotonicity(n_max: int, backend: ScalarBackend = RATIONAL) -> CheckReport:
    """x_{n+1} <= x_n and inf <= x_n coordinatewise on the window 1..n_max+1"""
    family, infimum = _neg_prefix_family(n_max, backend)
    window = n_max + 1
    report = CheckReport(name="linf_order")
    for n, x in enumerate(family, 1):
        report.checked += 1
        if any(infimum.coordinate(i) > x.coordinate(i) for i in range(window)):
            report.record(n=n, reason="infimum not below x_n")
        if n < len(family):
            successor = family[n]
            if any(successor.coordinate(i) > x.coordinate(i) for i in range(window)):
                report.record(n=n, reason="x_{n+1} not below x_n")
    return report


class LinfDemo:
    """l-infinity family that decreases yet stays at distance 1 from its infimum"""

    def __init__(self, n_max: int, backend: ScalarBackend = RATIONAL):
        self.logger = setup_logger(self.__class__.__name__)
        self.n_max = n_max
        self.backend = backend

    def gaps(self) -> List[Scalar]:
        return infimum_gap_demo(self.n_max, self.backend)

    def gap_report(self, gaps: Sequence[Scalar]) -> CheckReport:
        """Every distance to the infimum equals 1"""
        report = CheckReport(name="infimum_gap", checked=len(gaps))
        for n, gap in enumerate(gaps, 1):
            if gap != 1:
                report.record(n=n, gap=gap)
        if report.passed:
            self.logger.debug(f"Distance to the infimum is 1 for n = 1..{len(gaps)}")
        return report

    def order_report(self) -> CheckReport:
        return linf_monotonicity(self.n_max, self.backend)
