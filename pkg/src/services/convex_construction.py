"""Slope chains, sup-of-lines interpolants and the four-case knot planner"""

from math import floor
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.errors import (
    BadCase,
    BadQ,
    BelowDepth,
    DepthExhausted,
    InvalidSequence,
    NonDecreasingKnots,
    PrefixNotDropped,
    SlopeChainViolation,
    Underflow,
    UnsupportedLimit,
    ZeroLimit,
    ZeroSlope,
)
from src.core.logger import setup_logger
from src.models.interpolant import (
    AffinePiece,
    CaseKind,
    CaseTag,
    Direction,
    InterpolationPlan,
    MonotoneSelection,
    IntegerKnotResult,
    SlopeCheck,
    SupOfLines,
)
from src.models.report import CheckReport
from src.models.vectors import DualFunctional
from src.utils.sampling import interior_points
from src.utils.scalars import FLOAT_UNDERFLOW, Scalar, backend_of, log_magnitude

logger = setup_logger("ConvexConstruction")

MIN_USABLE_TERMS = 3

# Relative log gap below which the threshold test falls back to exact knots
SCREEN_MARGIN = 1e-9


def _slopes(knots: Sequence[Scalar], values: Sequence[Scalar]) -> List[Scalar]:
    return [
        (values[i + 1] - values[i]) / (knots[i + 1] - knots[i])
        for i in range(len(knots) - 1)
    ]


def check_slope_chain(knots: Sequence[Scalar], values: Sequence[Scalar]) -> SlopeCheck:
    """Slopes between consecutive knots must be nonincreasing along the knots

    The reported index is the 0-based position of the knot shared by the two
    offending pieces.

    Raises:
        InvalidSequence: fewer than two knots or mismatched lengths
        NonDecreasingKnots: knots are not strictly decreasing
    """
    if len(knots) != len(values) or len(knots) < 2:
        raise InvalidSequence(
            f"Need at least two knots with matching values, got {len(knots)} and {len(values)}"
        )
    for i in range(len(knots) - 1):
        if not knots[i + 1] < knots[i]:
            raise NonDecreasingKnots(f"Knot {i + 1} ({knots[i + 1]}) is not below knot {i} ({knots[i]})")

    slopes = _slopes(knots, values)
    backend = backend_of(knots[0])
    for i in range(len(slopes) - 1):
        left, right = slopes[i], slopes[i + 1]
        slack = backend.order_tolerance * max(1, abs(left), abs(right))
        if left < right - slack:
            return SlopeCheck(False, i + 1, tuple(slopes))
    return SlopeCheck(True, None, tuple(slopes))


def build_sup_of_lines(knots: Sequence[Scalar], values: Sequence[Scalar]) -> SupOfLines:
    """Convex interpolant g with g(t_m) = a_m

    Raises:
        SlopeChainViolation: the slope chain fails (carries the knot index)
    """
    check = check_slope_chain(knots, values)
    if not check:
        raise SlopeChainViolation(check.index)
    pieces = tuple(
        AffinePiece(knots[i], values[i], slope) for i, slope in enumerate(check.slopes)
    )
    return SupOfLines(tuple(knots), tuple(values), pieces)


def eval_g(g: SupOfLines, r: Scalar) -> Scalar:
    """max over the pieces; equals the active piece on every knot interval

    Raises:
        BelowDepth: r lies below the smallest knot
    """
    if r < g.smallest_knot:
        raise BelowDepth(r, g.smallest_knot)
    return max(piece(r) for piece in g.pieces)


def piece_index(g: SupOfLines, r: Scalar) -> int:
    """Index k of the piece active at r, intervals half-open (t_{k+1}, t_k]"""
    if r < g.smallest_knot:
        raise BelowDepth(r, g.smallest_knot)
    if r > g.knots[1]:
        return 0
    lo, hi = 1, len(g.knots) - 1
    # smallest k with r > t_{k+1}, or the last piece at the bottom knot
    while lo < hi:
        mid = (lo + hi) // 2
        if r > g.knots[mid + 1]:
            hi = mid
        else:
            lo = mid + 1
    return min(lo, len(g.pieces) - 1)


def eval_g_on_interval(g: SupOfLines, r: Scalar) -> Scalar:
    """Interval-lookup evaluation, used to cross-check eval_g"""
    return g.pieces[piece_index(g, r)](r)


def build_integer_knots(sequence: Sequence[Scalar]) -> IntegerKnotResult:
    """Integer knots m_1 = 1, m_2 = 2, then m_{k+2} = floor(zero of f_k) + 1

    f_k is the line through (m_k, a_{m_k}) and (m_{k+1}, a_{m_{k+1}}); the
    recurrence stops once the next index exceeds the supplied length.

    Raises:
        InvalidSequence: fewer than two terms, a negative term or an increase
        ZeroSlope: a horizontal piece above zero
    """
    if len(sequence) < 2:
        raise InvalidSequence("Integer-knot recurrence needs at least two terms")
    for i, value in enumerate(sequence):
        if value < 0:
            raise InvalidSequence(f"Term {i + 1} is negative: {value}")
        if i and value > sequence[i - 1]:
            raise InvalidSequence(f"Term {i + 1} increases: {value} > {sequence[i - 1]}")

    def a(m: int) -> Scalar:
        return sequence[m - 1]

    indices = [1, 2]
    crossings = []
    while True:
        m_k, m_next = indices[-2], indices[-1]
        slope = (a(m_next) - a(m_k)) / (m_next - m_k)
        if slope == 0:
            if a(m_k) > 0:
                raise ZeroSlope(len(indices) - 1)
            break
        crossing = m_k - a(m_k) / slope
        crossings.append(crossing)
        following = floor(crossing) + 1
        if following > len(sequence):
            break
        indices.append(following)

    backend = backend_of(sequence[0])
    knots = [backend.coerce(m) for m in reversed(indices)]
    values = [a(m) for m in reversed(indices)]
    interpolant = build_sup_of_lines(knots, values)
    logger.debug(f"Integer knots {indices}, crossings {[str(x) for x in crossings]}")
    return IntegerKnotResult(tuple(indices), interpolant, tuple(crossings))


def extract_monotone(values: Sequence[Scalar]) -> MonotoneSelection:
    """Monotone subsequence via peak points

    Peaks (values[i] >= everything after it) form a nonincreasing
    subsequence; otherwise a greedy strictly increasing chain is taken. The
    longer of the two wins, nonincreasing on ties.
    """
    if not values:
        raise InvalidSequence("Cannot extract a monotone subsequence from no values")

    peaks = []
    running_max = None
    for i in range(len(values) - 1, -1, -1):
        if running_max is None or values[i] >= running_max:
            peaks.append(i)
            running_max = values[i]
    peaks.reverse()

    chain = [0]
    for i in range(1, len(values)):
        if values[i] > values[chain[-1]]:
            chain.append(i)

    if len(peaks) >= len(chain):
        return MonotoneSelection(tuple(peaks), Direction.NONINCREASING)
    return MonotoneSelection(tuple(chain), Direction.INCREASING)


def rescale_functional(probe: DualFunctional, raw_limit: Scalar,
                       target_z: Scalar) -> Tuple[DualFunctional, Scalar]:
    """c = target_z / raw_limit and the functional c * probe

    Raises:
        ZeroLimit: raw_limit is zero
        UnsupportedLimit: target_z is not positive or equals 1
    """
    if raw_limit == 0:
        raise ZeroLimit("Probe values tend to 0; the family would converge weakly to zero")
    _check_limit(target_z)
    c = target_z / raw_limit
    if c == 1:
        return probe, c
    return probe.scaled(c), c


def _check_limit(z: Scalar):
    if z <= 0:
        raise UnsupportedLimit(f"Limit z must be positive, got {z}")
    if z == 1:
        raise UnsupportedLimit("Limit z = 1 falls between the cases; rescale to another target")


def _resolve_case(direction: Direction, z: Scalar, q_choice: Optional[Scalar],
                  expected_case: Optional[CaseKind]) -> CaseTag:
    kind = CaseKind.classify(direction, z)
    if expected_case is not None and expected_case is not kind:
        raise BadCase(
            f"Requested case {expected_case.value} but {direction.value} values "
            f"with limit {z} give {kind.value}"
        )
    if not kind.needs_q:
        if q_choice is not None:
            logger.debug(f"Ignoring q={q_choice} for case {kind.value}")
        return CaseTag(kind)

    if kind is CaseKind.NONINC_HIGH:
        q = q_choice if q_choice is not None else 2 * z
        if not q > z:
            raise BadQ(f"Case {kind.value} needs q > z = {z}, got {q}")
    else:
        q = q_choice if q_choice is not None else z / 2
        if not 0 < q < z:
            raise BadQ(f"Case {kind.value} needs 0 < q < z = {z}, got {q}")
    return CaseTag(kind, q)


def _within_bounds(tag: CaseTag, value: Scalar) -> bool:
    kind = tag.kind
    if kind is CaseKind.NONINC_LOW:
        return 0 < value < 1
    if kind is CaseKind.NONINC_HIGH:
        return 0 < value < tag.q
    if kind is CaseKind.INCR_HIGH:
        return value >= 1
    return value >= tag.q


def _knot_value(tag: CaseTag, m: int, z_m: Scalar) -> Tuple[Scalar, Scalar]:
    """Closed forms (t_m, a_m) of each case, exponent = family index m"""
    kind = tag.kind
    if kind is CaseKind.NONINC_LOW:
        t = z_m ** m
        return t, t * z_m
    if kind is CaseKind.NONINC_HIGH:
        t = (z_m / tag.q) ** m
        return t, t * z_m / tag.q
    if kind is CaseKind.INCR_HIGH:
        t = 1 / z_m ** m
        return t, -t * z_m
    t = (tag.q / z_m) ** m
    return t, -t * z_m / tag.q


def _direction_of(values: Sequence[Scalar]) -> Optional[Direction]:
    """Direction of a monotone list, None when every value is equal"""
    if all(v == values[0] for v in values):
        return None
    if all(values[i + 1] <= values[i] for i in range(len(values) - 1)):
        return Direction.NONINCREASING
    if all(values[i + 1] > values[i] for i in range(len(values) - 1)):
        return Direction.INCREASING
    raise InvalidSequence("Values are not monotone; run extract_monotone first")


def plan_case(scaled_values: Sequence[Scalar], limit_z: Scalar, q_choice: Optional[Scalar] = None,
              depth: int = 8, source_indices: Optional[Sequence[int]] = None,
              expected_case: Optional[CaseKind] = None,
              knot_cache: Optional[Dict] = None) -> InterpolationPlan:
    """Assign the case and select indices m_k so that (t_k, a_k) obey the slope chain

    Args:
        scaled_values: monotone values z_m = y*(y_m) after rescaling
        limit_z: their limit, in (0, 1) or (1, inf)
        q_choice: q for NonincHigh / IncrLow (defaults 2z and z/2)
        depth: number of knots to select
        source_indices: 1-based family index of each value (default 1..n)
        expected_case: explicit case; must agree with the values
        knot_cache: exact (t_m, a_m) already computed, shared across calls

    Returns:
        InterpolationPlan with the selection thresholds recorded

    Raises:
        UnsupportedLimit, BadQ, BadCase, InvalidSequence, PrefixNotDropped,
        DepthExhausted, Underflow (float64 knots below 2^-960)
    """
    if source_indices is None:
        source_indices = list(range(1, len(scaled_values) + 1))
    if len(source_indices) != len(scaled_values):
        raise InvalidSequence("source_indices must match the values one to one")
    if not scaled_values:
        raise InvalidSequence("No values to plan from")
    if depth < 2:
        raise DepthExhausted(depth, 2)

    _check_limit(limit_z)
    backend = backend_of(scaled_values[0])
    direction = _direction_of(scaled_values)
    constant = direction is None
    tag = _resolve_case(direction or Direction.NONINCREASING, limit_z, q_choice, expected_case)

    dropped = 0
    while dropped < len(scaled_values) and not _within_bounds(tag, scaled_values[dropped]):
        dropped += 1
    values = list(scaled_values[dropped:])
    indices = list(source_indices[dropped:])
    if len(values) < MIN_USABLE_TERMS:
        raise PrefixNotDropped(dropped, len(values))
    for offset, value in enumerate(values):
        if not _within_bounds(tag, value):
            raise InvalidSequence(
                f"Value {value} at family index {indices[offset]} violates the {tag.kind.value} bounds "
                f"after the dropped prefix"
            )
    if dropped:
        logger.debug(f"Dropped {dropped} leading terms outside the {tag.kind.value} bounds")

    cache = knot_cache if knot_cache is not None else {}

    def knot(position: int) -> Tuple[Scalar, Scalar]:
        key = (tag, indices[position], values[position])
        if key not in cache:
            t, a = _knot_value(tag, indices[position], values[position])
            if not backend.exact and (t == 0 or abs(t) < FLOAT_UNDERFLOW):
                raise Underflow(t)
            cache[key] = (t, a)
        return cache[key]

    if constant:
        count = min(depth, len(values))
        chosen = list(range(count))
        thresholds: List[Scalar] = []
    else:
        chosen, thresholds = _select(tag, values, indices, depth, knot, screen=backend.exact)

    if len(chosen) < depth:
        raise DepthExhausted(len(chosen), depth)

    knots_values = [knot(p) for p in chosen]
    knots_t = tuple(t for t, _ in knots_values)
    values_a = tuple(a for _, a in knots_values)
    check = check_slope_chain(knots_t, values_a)
    if not check:
        raise SlopeChainViolation(check.index)

    plan = InterpolationPlan(
        case=tag,
        limit_z=limit_z,
        scale_c=backend.one,
        sub_indices=tuple(indices[p] for p in chosen),
        knots_t=knots_t,
        values_a=values_a,
        thresholds=tuple(thresholds),
        selected_values=tuple(values[p] for p in chosen),
        dropped=dropped,
        constant=constant,
    )
    logger.debug(f"Planned {tag} at depth {depth}: indices {list(plan.sub_indices)}")
    return plan


def _select(tag: CaseTag, values: Sequence[Scalar], indices: Sequence[int], depth: int,
            knot, screen: bool) -> Tuple[List[int], List[Scalar]]:
    """Inductive selection of positions; first hit of the threshold wins

    With `screen` set, candidates are tested on logarithms first and the
    exact knot is computed only for the hit and for near ties.
    """
    nonincreasing = tag.kind.nonincreasing

    def admissible(previous: int, candidate: int) -> bool:
        # ties never lower the value, so they are skipped in the nonincreasing cases
        return not nonincreasing or values[candidate] < values[previous]

    chosen = [0]
    position = 1
    while position < len(values) and not admissible(0, position):
        position += 1
    if position >= len(values):
        return chosen, []
    chosen.append(position)

    thresholds = []
    while len(chosen) < depth:
        (t_i, a_i), (t_j, a_j) = knot(chosen[-2]), knot(chosen[-1])
        if nonincreasing:
            threshold = (t_i * a_j - t_j * a_i) / (a_j - a_i)
        else:
            threshold = (t_j * a_i - t_i * a_j) / (t_j - t_i)
        # t_m > 0 and a_m < 0 in the increasing cases, so a bad sign never hits
        if (threshold <= 0) if nonincreasing else (threshold >= 0):
            break
        log_threshold = log_magnitude(threshold) if screen else None

        hit = None
        for candidate in range(chosen[-1] + 1, len(values)):
            if not admissible(chosen[-1], candidate):
                continue
            if screen:
                verdict = _screen(tag, indices[candidate], values[candidate], log_threshold)
                if verdict is False:
                    continue
            t_m, a_m = knot(candidate)
            if (t_m < threshold) if nonincreasing else (a_m > threshold):
                hit = candidate
                break
        if hit is None:
            break
        thresholds.append(threshold)
        chosen.append(hit)
    return chosen, thresholds


def _knot_logs(tag: CaseTag, m: int, z_m: Scalar) -> Tuple[float, float]:
    """log t_m and log |a_m| from the closed forms of _knot_value"""
    log_z = log_magnitude(z_m)
    kind = tag.kind
    if kind is CaseKind.NONINC_LOW:
        log_t = m * log_z
        return log_t, log_t + log_z
    if kind is CaseKind.INCR_HIGH:
        log_t = -m * log_z
        return log_t, log_t + log_z
    log_q = log_magnitude(tag.q)
    if kind is CaseKind.NONINC_HIGH:
        log_t = m * (log_z - log_q)
    else:
        log_t = m * (log_q - log_z)
    return log_t, log_t + log_z - log_q


def _screen(tag: CaseTag, m: int, z_m: Scalar, log_threshold: float) -> Optional[bool]:
    """Threshold test on logarithms; None when the two sides are too close to call

    Nonincreasing cases hit when t_m < C, increasing ones when |a_m| < |C|.
    """
    log_t, log_a = _knot_logs(tag, m, z_m)
    side = log_t if tag.kind.nonincreasing else log_a
    margin = SCREEN_MARGIN * max(1.0, abs(side), abs(log_threshold))
    if side < log_threshold - margin:
        return True
    if side > log_threshold + margin:
        return False
    return None


def slope_chain_report(knots: Sequence[Scalar], values: Sequence[Scalar]) -> CheckReport:
    """check_slope_chain as a verification report"""
    report = CheckReport(name="slopes", checked=max(len(knots) - 2, 0))
    check = check_slope_chain(knots, values)
    if not check:
        report.record(index=check.index, left=check.slopes[check.index - 1],
                      right=check.slopes[check.index])
    return report


def interpolation_report(g: SupOfLines, samples_per_piece: int = 100) -> CheckReport:
    """Node identity g(t_k) = a_k, interval identity and midpoint convexity"""
    report = CheckReport(name="interp", details={"samples_per_piece": samples_per_piece})
    backend = backend_of(g.knots[0])

    for k, (t, a) in enumerate(zip(g.knots, g.values)):
        report.checked += 1
        if not backend.equal(eval_g(g, t), a):
            report.record(kind="node", k=k + 1, t=t, expected=a, got=eval_g(g, t))

    samples = [g.knots[0], g.knots[0] * 2]
    for k, piece in enumerate(g.pieces):
        for r in interior_points(g.knots[k + 1], g.knots[k], samples_per_piece, backend):
            report.checked += 1
            value, expected = eval_g(g, r), piece(r)
            if not backend.equal(value, expected) or not backend.equal(value, eval_g_on_interval(g, r)):
                report.record(kind="interval", k=k + 1, r=r, expected=expected, got=value)
        samples.append(g.knots[k + 1])
        samples.append((g.knots[k] + g.knots[k + 1]) / 2)

    at_samples = [eval_g(g, r) for r in samples]
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            r, s = samples[i], samples[j]
            mid = eval_g(g, (r + s) / 2)
            bound = (at_samples[i] + at_samples[j]) / 2
            report.checked += 1
            if mid > bound + backend.order_tolerance * max(1, abs(mid), abs(bound)):
                report.record(kind="midpoint", r=r, s=s, mid=mid, bound=bound)
    return report


class ConvexBuilder:
    """Convex interpolants from a user sequence: integer knots, explicit knots, or a case plan"""

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)

    def integer_knots(self, sequence: Sequence[Scalar]) -> IntegerKnotResult:
        result = build_integer_knots(sequence)
        self.logger.info(f"Integer knots: {list(result.indices)}")
        return result

    def sup_of_lines(self, knots: Sequence[Scalar], values: Sequence[Scalar]) -> SupOfLines:
        g = build_sup_of_lines(knots, values)
        self.logger.info(f"Sup of {len(g.pieces)} lines through {g.depth} knots")
        return g

    def plan(self, values: Sequence[Scalar], limit_z: Scalar, q_choice: Optional[Scalar] = None,
             depth: int = 8, expected_case: Optional[CaseKind] = None) -> InterpolationPlan:
        """plan_case on the longest monotone subsequence of values"""
        indices, direction = extract_monotone(values)
        self.logger.info(f"Monotone subsequence of {len(indices)} terms, {direction.value}")
        return plan_case(
            [values[i] for i in indices],
            limit_z,
            q_choice=q_choice,
            depth=depth,
            source_indices=[i + 1 for i in indices],
            expected_case=expected_case,
        )

    def reports(self, g: SupOfLines) -> List[CheckReport]:
        return [slope_chain_report(g.knots, g.values), interpolation_report(g)]
