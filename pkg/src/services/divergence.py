"""K-convex ray mappings whose difference quotient at 0 has no norm limit"""

from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from src.core.errors import (
    BelowDepth,
    DepthExhausted,
    InvalidSequence,
    InvalidSpec,
    OutsideDomain,
    PrefixNotDropped,
    TooShort,
)
from src.core.logger import setup_logger
from src.models.cone import HalfSpaceCone
from src.models.interpolant import SupOfLines
from src.models.mapping import (
    CounterexampleOptions,
    DifferenceQuotientTrace,
    ExtendedMapping,
    HalfSpaceHost,
    RayMapping,
)
from src.models.report import CheckReport, ConvexityReport
from src.models.vectors import DualFunctional, FamilySpec, TruncatedVector
from src.services.cones import dominates
from src.services.convex_construction import (
    build_sup_of_lines,
    eval_g_on_interval,
    extract_monotone,
    interpolation_report,
    piece_index,
    plan_case,
    rescale_functional,
    slope_chain_report,
)
from src.services.sequence_spaces import (
    extrapolate_limit,
    closed_form_limit,
    family_member,
    family_values,
    pair,
)
from src.utils.sampling import (
    LAMBDA_GRID,
    log_spaced,
    make_rng,
    piecewise_sample,
    small_scalar,
)
from src.utils.scalars import FLOAT_IDENTITY_TOLERANCE, RATIONAL, Scalar, ScalarBackend, backend_of

logger = setup_logger("Divergence")

INITIAL_FAMILY_DEPTH = 32

# F(r h) values memoized per mapping
EVALUATION_CACHE_LIMIT = 4096

Mapping = Union[RayMapping, ExtendedMapping]


class CounterexampleBuilder:
    """Cone K and the K-convex ray mapping F for one family and probe

    Canonical families are truncated at 32 members and doubled until the
    plan reaches the requested depth or options.max_family_depth is hit.
    Pairings and exact knots carry over from one doubling to the next.
    """

    def __init__(self, family: FamilySpec, probe: DualFunctional,
                 backend: ScalarBackend = RATIONAL):
        self.logger = setup_logger(self.__class__.__name__)
        self.family = family
        self.probe = probe
        self.backend = backend
        self.values: List[Scalar] = []
        self.knot_cache: Dict = {}

    def build(self, options: Optional[CounterexampleOptions] = None) -> Tuple[HalfSpaceCone, RayMapping]:
        """Build with the largest supply the options allow

        Raises:
            ZeroLimit: probe values tend to 0
            InvalidSequence: the limit of the probe values has no closed form
            DepthExhausted: not enough family members to select `depth` knots
        """
        options = options or CounterexampleOptions()
        if options.depth < 2:
            raise DepthExhausted(options.depth, 2)

        family = self.family
        if family.has_fixed_supply:
            supply = family.depth
        else:
            supply = min(max(INITIAL_FAMILY_DEPTH, family.depth), options.max_family_depth)

        while True:
            try:
                cone, mapping = self._build_once(family.with_depth(supply), options)
                break
            except (DepthExhausted, PrefixNotDropped) as e:
                if family.has_fixed_supply or supply >= options.max_family_depth:
                    raise
                supply = min(supply * 2, options.max_family_depth)
                self.logger.debug(f"{e}; retrying with {supply} family members")

        self.logger.info(
            f"Built {mapping.case} counterexample: depth {mapping.depth}, "
            f"indices {list(mapping.plan.sub_indices)}"
        )
        return cone, mapping

    def _build_once(self, spec: FamilySpec,
                    options: CounterexampleOptions) -> Tuple[HalfSpaceCone, RayMapping]:
        backend = self.backend
        self.values = family_values(spec, self.probe, backend, known=self.values)
        values = self.values
        raw_limit = closed_form_limit(spec, self.probe)
        if raw_limit is None:
            raw_limit, source = extrapolate_limit(values)
            if raw_limit is None:
                raise InvalidSequence("Probe values have no closed-form or geometric limit")
            self.logger.debug(f"Raw limit {raw_limit} from {source} extrapolation")

        generator, c = rescale_functional(self.probe, raw_limit, backend.coerce(options.target_z))
        scaled = [c * v for v in values]
        indices, _ = extract_monotone(scaled)
        plan = plan_case(
            [scaled[i] for i in indices],
            backend.coerce(options.target_z),
            q_choice=backend.coerce(options.q) if options.q is not None else None,
            depth=options.depth,
            source_indices=[i + 1 for i in indices],
            expected_case=options.case,
            knot_cache=self.knot_cache,
        )
        plan = replace(plan, scale_c=c)

        kappa = plan.case.node_factor()
        nodes = tuple(
            family_member(spec, m, backend).scale(kappa * t)
            for m, t in zip(plan.sub_indices, plan.knots_t)
        )
        cone = HalfSpaceCone(generator, backend.order_tolerance)
        mapping = RayMapping(
            case=plan.case,
            knots_t=plan.knots_t,
            node_vectors=nodes,
            plan=plan,
            family_ref=spec,
            generator=generator,
            raw_probe=self.probe,
            options=options,
            max_depth=options.max_depth or options.depth,
            interpolant=build_sup_of_lines(plan.knots_t, plan.values_a),
        )
        return cone, mapping


def build_counterexample(family: FamilySpec, probe: DualFunctional,
                         options: Optional[CounterexampleOptions] = None,
                         backend: ScalarBackend = RATIONAL) -> Tuple[HalfSpaceCone, RayMapping]:
    """CounterexampleBuilder(family, probe, backend).build(options)"""
    return CounterexampleBuilder(family, probe, backend).build(options)


def interpolant_of(mapping: RayMapping) -> SupOfLines:
    """g through (t_k, a_k) of the mapping's plan, stored on the mapping"""
    g = mapping.interpolant
    if g is None or g.knots != mapping.plan.knots_t:
        g = build_sup_of_lines(mapping.plan.knots_t, mapping.plan.values_a)
        mapping.interpolant = g
    return g


def _deepen(mapping: RayMapping, r: Scalar):
    with mapping.lock:
        while r < mapping.smallest_knot and mapping.depth < mapping.max_depth:
            depth = min(mapping.depth * 2, mapping.max_depth)
            options = replace(mapping.options, depth=depth, max_depth=mapping.max_depth)
            _, deeper = build_counterexample(
                mapping.family_ref, mapping.raw_probe, options, backend_of(mapping.smallest_knot)
            )
            mapping.replace_nodes(deeper)
            logger.debug(f"Deepened mapping to {depth} knots")


def eval_F(mapping: RayMapping, r: Scalar) -> TruncatedVector:
    """F(r h): 0 at r = 0, affine on (t_{k+1}, t_k], first piece extended above t_2

    Values are memoized on the mapping up to EVALUATION_CACHE_LIMIT entries.

    Raises:
        OutsideDomain: r < 0
        BelowDepth: 0 < r below the deepest knot and no deepening allowed
    """
    if r < 0:
        raise OutsideDomain(r)
    if r == 0:
        return TruncatedVector.zero()
    cached = mapping.evaluations.get(r)
    if cached is not None:
        return cached
    if r < mapping.smallest_knot:
        if mapping.max_depth > mapping.depth:
            _deepen(mapping, r)
        if r < mapping.smallest_knot:
            raise BelowDepth(r, mapping.smallest_knot)

    knots = mapping.knots_t
    k = piece_index(interpolant_of(mapping), r)
    if r == knots[k]:
        value = mapping.node_vectors[k]
    elif r == knots[k + 1]:
        value = mapping.node_vectors[k + 1]
    else:
        weight = (r - knots[k]) / (knots[k + 1] - knots[k])
        value = mapping.node_vectors[k].combine(1 - weight, mapping.node_vectors[k + 1], weight)
    if len(mapping.evaluations) < EVALUATION_CACHE_LIMIT:
        mapping.evaluations[r] = value
    return value


def eval_extended(extended: ExtendedMapping, x: Sequence[Scalar]) -> TruncatedVector:
    """F-bar(x) = F(<x, h>)

    Raises:
        OutsideDomain: <x, h> < 0
    """
    inner = extended.host.inner(x)
    if inner < 0:
        raise OutsideDomain(inner)
    return eval_F(extended.mapping, inner)


def extend_to_halfspace(mapping: RayMapping, host: HalfSpaceHost) -> ExtendedMapping:
    return ExtendedMapping(mapping, host)


def node_identity(mapping: RayMapping) -> CheckReport:
    """pair(y*, v_k) = a_k at every knot"""
    report = CheckReport(name="nodes")
    backend = backend_of(mapping.smallest_knot)
    for k, (v, a) in enumerate(zip(mapping.node_vectors, mapping.plan.values_a), 1):
        report.checked += 1
        value = pair(mapping.generator, v)
        if not backend.equal(value, a):
            report.record(k=k, expected=a, got=value)
    return report


def scalarization_identity(mapping: RayMapping, cone: HalfSpaceCone,
                           sample_rs: Sequence[Scalar]) -> CheckReport:
    """pair(y*, F(r h)) = g(r) at every sample

    g is read off its active piece; interpolation_report ties that to the
    sup over all pieces.

    Raises:
        BelowDepth: a sample lies below the deepest knot
    """
    report = CheckReport(name="scalarize")
    backend = backend_of(mapping.smallest_knot)
    for r in sample_rs:
        report.checked += 1
        lhs = pair(cone.generator, eval_F(mapping, r))
        rhs = eval_g_on_interval(interpolant_of(mapping), r)
        if not backend.equal(lhs, rhs):
            report.record(r=r, scalarized=lhs, g=rhs)
    return report


def default_samples(mapping: RayMapping, count: int = 100) -> List[Scalar]:
    """Knots plus count log-spaced points over [t_depth, t_1]"""
    backend = backend_of(mapping.smallest_knot)
    points = list(mapping.knots_t)
    points.extend(log_spaced(mapping.smallest_knot, mapping.knots_t[0], count, backend))
    return points


def _draw_point(rng, mapping: Mapping, backend: ScalarBackend):
    """A ray parameter, or a half-space point s h + w with w orthogonal to h"""
    ray = mapping if isinstance(mapping, RayMapping) else mapping.mapping
    s = piecewise_sample(rng, ray.knots_t, backend)
    if isinstance(mapping, RayMapping):
        return s
    host = mapping.host
    v = [small_scalar(rng, backend) for _ in range(host.dimension)]
    along = host.inner(v)
    return tuple(s * h + (vi - along * h) for vi, h in zip(v, host.direction_h))


def _combine(lam: Scalar, x, y):
    if isinstance(x, tuple):
        return tuple(lam * a + (1 - lam) * b for a, b in zip(x, y))
    return lam * x + (1 - lam) * y


def _evaluator(mapping: Mapping):
    if isinstance(mapping, RayMapping):
        return lambda x: eval_F(mapping, x)
    return lambda x: eval_extended(mapping, x)


def verify_K_convexity(mapping: Mapping, cone: HalfSpaceCone, trials: int = 1000,
                       seed: int = 0) -> ConvexityReport:
    """Direct dominance, scalarized midpoint and epigraph midpoint checks

    Accepts a RayMapping (samples r in [t_depth, 2 t_1]) or an
    ExtendedMapping (samples x = s h + w in the half-space).
    """
    if trials < 1:
        raise InvalidSpec(f"trials must be at least 1, got {trials}")
    ray = mapping if isinstance(mapping, RayMapping) else mapping.mapping
    backend = backend_of(ray.smallest_knot)
    F = _evaluator(mapping)
    rng = make_rng(seed)
    lambdas = [backend.coerce(lam) for lam in LAMBDA_GRID]
    tolerance = backend.order_tolerance
    half = backend.coerce("1/2")

    direct = CheckReport(name="convexity_direct", details={"lambdas": lambdas})
    scalarized = CheckReport(name="convexity_scalarized")
    epigraph = CheckReport(name="convexity_epigraph")

    for trial in range(trials):
        x = _draw_point(rng, mapping, backend)
        y = _draw_point(rng, mapping, backend)
        fx, fy = F(x), F(y)

        for lam in lambdas:
            direct.checked += 1
            lower = F(_combine(lam, x, y))
            upper = fx.combine(lam, fy, 1 - lam)
            if not dominates(cone, lower, upper):
                direct.record(trial=trial, x=x, y=y, lam=lam)

        scalarized.checked += 1
        mid = pair(cone.generator, F(_combine(half, x, y)))
        bound = (pair(cone.generator, fx) + pair(cone.generator, fy)) / 2
        if mid > bound + tolerance * max(1, abs(mid), abs(bound)):
            scalarized.record(trial=trial, x=x, y=y, mid=mid, bound=bound)

        epigraph.checked += 1
        upper_x = fx + _cone_element(rng, cone, len(fx), backend)
        upper_y = fy + _cone_element(rng, cone, len(fy), backend)
        if not dominates(cone, F(_combine(half, x, y)), upper_x.combine(half, upper_y, half)):
            epigraph.record(trial=trial, x=x, y=y)

    report = ConvexityReport(
        direct=direct,
        scalarized=scalarized,
        epigraph=epigraph,
        seed=seed,
        trials=trials,
        depth=ray.depth,
    )
    if not report.passed:
        logger.warning(f"K-convexity violations found (seed {seed}, {trials} trials)")
    return report


def _cone_element(rng, cone: HalfSpaceCone, length: int, backend: ScalarBackend) -> TruncatedVector:
    """Random k with generator(k) >= 0"""
    k = TruncatedVector(tuple(small_scalar(rng, backend) for _ in range(max(length, 1))))
    return -k if pair(cone.generator, k) < 0 else k


def quotient_trace(mapping: RayMapping, cone: HalfSpaceCone,
                   ks: Optional[Sequence[int]] = None) -> DifferenceQuotientTrace:
    """q(t_k) = (F(t_k h) - F(0)) / t_k at the 1-based knots ks (all by default)"""
    ks = list(ks) if ks is not None else list(range(1, mapping.depth + 1))
    for k in ks:
        if not 1 <= k <= mapping.depth:
            raise InvalidSpec(f"Knot number {k} outside 1..{mapping.depth}")
    ts = [mapping.knots_t[k - 1] for k in ks]
    quotients = [mapping.node_vectors[k - 1].scale(1 / t) for k, t in zip(ks, ts)]
    return _trace(ks, [mapping.plan.sub_indices[k - 1] for k in ks], ts, quotients, cone.generator)


def _trace(ks, indices, ts, quotients, generator: Optional[DualFunctional]) -> DifferenceQuotientTrace:
    scalarized = [pair(generator, q) if generator is not None else 0 for q in quotients]
    gaps = tuple(
        tuple((quotients[i] - quotients[j]).sup_norm() for j in range(len(quotients)))
        for i in range(len(quotients))
    )
    return DifferenceQuotientTrace(
        ks=tuple(ks),
        indices=tuple(indices),
        ts=tuple(ts),
        quotients=tuple(quotients),
        scalarized=tuple(scalarized),
        pairwise_norm_gaps=gaps,
    )


def linear_control(vector: TruncatedVector, knots: Sequence[Scalar],
                   generator: Optional[DualFunctional] = None) -> DifferenceQuotientTrace:
    """Trace of the convergent control F(r h) = r * vector at the given knots"""
    quotients = [vector.scale(t).scale(1 / t) for t in knots]
    ks = list(range(1, len(knots) + 1))
    return _trace(ks, ks, list(knots), quotients, generator)


def expected_gap(mapping: RayMapping) -> Scalar:
    """|kappa|: pairwise quotient gap on the partial-sum family (1 or 1/q)"""
    return abs(mapping.case.node_factor())


def assert_divergence(trace: DifferenceQuotientTrace, gap_floor: Scalar) -> bool:
    """True iff every pairwise sup-norm gap of q(t_k) is at least gap_floor

    Raises:
        TooShort: fewer than two entries
    """
    if len(trace) < 2:
        raise TooShort("Divergence needs at least two quotients")
    if not gap_floor > 0:
        raise InvalidSpec(f"gap_floor must be positive, got {gap_floor}")
    return all(
        trace.gap(i, j) >= gap_floor
        for i in range(len(trace))
        for j in range(len(trace))
        if i != j
    )


def divergence_report(trace: DifferenceQuotientTrace, gap_floor: Scalar) -> CheckReport:
    report = CheckReport(name="divergence", details={"gap_floor": gap_floor})
    n = len(trace)
    report.checked = n * (n - 1) // 2
    if not assert_divergence(trace, gap_floor):
        for i in range(n):
            for j in range(i + 1, n):
                if trace.gap(i, j) < gap_floor:
                    report.record(k=trace.ks[i], j=trace.ks[j], gap=trace.gap(i, j))
    return report


def _quotient_at(mapping: RayMapping, t: Scalar) -> TruncatedVector:
    return eval_F(mapping, t).scale(1 / t)


def quotient_monotonicity(mapping: RayMapping, cone: HalfSpaceCone,
                          t_grid: Optional[Sequence[Scalar]] = None) -> CheckReport:
    """y*(q(t)) nondecreasing in t: q(t_small) <=_K q(t_large) on a decreasing grid"""
    grid = list(t_grid) if t_grid is not None else sorted(set(default_samples(mapping)), reverse=True)
    report = CheckReport(name="quotient_monotonicity")
    quotients = [_quotient_at(mapping, t) for t in grid]
    for i in range(len(grid) - 1):
        if grid[i + 1] > grid[i]:
            raise InvalidSpec("Quotient grid must be nonincreasing")
        report.checked += 1
        if not dominates(cone, quotients[i + 1], quotients[i]):
            report.record(t_large=grid[i], t_small=grid[i + 1],
                          large=pair(cone.generator, quotients[i]),
                          small=pair(cone.generator, quotients[i + 1]))
    return report


def ray_monotonicity(mapping: RayMapping, cone: HalfSpaceCone,
                     grid: Optional[Sequence[Scalar]] = None) -> CheckReport:
    """Nonincreasing cases: F(w1 h) <=_K F(w2 h) whenever w1 < w2"""
    report = CheckReport(name="ray_monotonicity")
    if not mapping.case.kind.nonincreasing:
        report.details["applicable"] = False
        return report
    report.details["applicable"] = True
    points = sorted(set(grid if grid is not None else default_samples(mapping)))
    values = [eval_F(mapping, w) for w in points]
    for i in range(len(points) - 1):
        report.checked += 1
        if not dominates(cone, values[i], values[i + 1]):
            report.record(w1=points[i], w2=points[i + 1])
    return report


def extension_consistency(extended: ExtendedMapping, ts: Sequence[Scalar],
                          seed: int = 0) -> CheckReport:
    """F-bar(t h) = F(t h) on ts and F-bar(x) = 0 for x orthogonal to h"""
    report = CheckReport(name="extension")
    host = extended.host
    backend = backend_of(extended.mapping.smallest_knot)
    for t in ts:
        report.checked += 1
        x = tuple(t * h for h in host.direction_h)
        gap = (eval_extended(extended, x) - eval_F(extended.mapping, t)).sup_norm()
        if gap > backend.order_tolerance:
            report.record(kind="ray", t=t)

    rng = make_rng(seed)
    for _ in range(len(ts)):
        v = [small_scalar(rng, backend) for _ in range(host.dimension)]
        along = host.inner(v)
        w = tuple(vi - along * h for vi, h in zip(v, host.direction_h))
        report.checked += 1
        if backend.exact:
            value = eval_extended(extended, w)
        elif abs(host.inner(w)) <= FLOAT_IDENTITY_TOLERANCE:
            # rounding leaves <w, h> near zero rather than at it
            value = eval_F(extended.mapping, 0)
        else:
            value = eval_extended(extended, w)
        if value != TruncatedVector.zero():
            report.record(kind="orthogonal", x=w)
    return report



class MappingVerifier:
    """Verification checks of one ray mapping against its cone, by check name"""

    def __init__(self, mapping: RayMapping, cone: HalfSpaceCone):
        self.logger = setup_logger(self.__class__.__name__)
        self.mapping = mapping
        self.cone = cone
        self.convexity: Optional[ConvexityReport] = None

    def slopes(self) -> CheckReport:
        return slope_chain_report(self.mapping.plan.knots_t, self.mapping.plan.values_a)

    def interpolation(self) -> CheckReport:
        return interpolation_report(interpolant_of(self.mapping))

    def nodes(self) -> CheckReport:
        return node_identity(self.mapping)

    def scalarization(self) -> CheckReport:
        return scalarization_identity(self.mapping, self.cone, default_samples(self.mapping))

    def convexity_checks(self, trials: int, seed: int) -> List[CheckReport]:
        """Direct, scalarized and epigraph reports; the full report stays on self.convexity"""
        self.convexity = verify_K_convexity(self.mapping, self.cone, trials, seed)
        self.logger.debug(f"K-convexity over {trials} trials: passed={self.convexity.passed}")
        return self.convexity.checks

    def divergence(self, gap_floor: Scalar) -> CheckReport:
        return divergence_report(quotient_trace(self.mapping, self.cone), gap_floor)

    def monotonicity(self) -> CheckReport:
        return quotient_monotonicity(self.mapping, self.cone)

    def ray_order(self) -> CheckReport:
        return ray_monotonicity(self.mapping, self.cone)

    def checks(self, names: Sequence[str], trials: int, seed: int,
               gap_floor: Scalar) -> Dict[str, Callable[[], object]]:
        """Callables for the named checks, in the order given

        Raises:
            InvalidSpec: an unknown check name
        """
        available: Dict[str, Callable[[], object]] = {
            "slopes": self.slopes,
            "interp": self.interpolation,
            "nodes": self.nodes,
            "scalarize": self.scalarization,
            "convexity": lambda: self.convexity_checks(trials, seed),
            "divergence": lambda: self.divergence(gap_floor),
            "monotonicity": self.monotonicity,
            "ray-order": self.ray_order,
        }
        unknown = [name for name in names if name not in available]
        if unknown:
            raise InvalidSpec(f"Unknown checks {unknown}; expected some of {sorted(available)}")
        return {name: available[name] for name in names}
