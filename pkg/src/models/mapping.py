"""Ray mappings, difference quotient traces and the half-space extension"""

import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.core.errors import InvalidSpec
from src.models.interpolant import CaseKind, CaseTag, InterpolationPlan, SupOfLines
from src.models.vectors import DualFunctional, FamilySpec, TruncatedVector
from src.utils.scalars import (
    FLOAT_IDENTITY_TOLERANCE,
    RATIONAL,
    Scalar,
    ScalarBackend,
    format_scalar,
)


@dataclass
class CounterexampleOptions:
    """Knobs of build_counterexample"""
    target_z: Scalar = RATIONAL.coerce("1/2")
    q: Optional[Scalar] = None
    depth: int = 8
    case: Optional[CaseKind] = None
    max_family_depth: int = 4096
    max_depth: Optional[int] = None

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidSpec(f"Depth must be positive, got {self.depth}")
        if self.max_depth is not None and self.max_depth < self.depth:
            raise InvalidSpec(f"max_depth {self.max_depth} is below depth {self.depth}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target_z": format_scalar(self.target_z),
            "q": format_scalar(self.q) if self.q is not None else None,
            "depth": self.depth,
            "case": self.case.value if self.case is not None else "auto",
            "max_family_depth": self.max_family_depth,
            "max_depth": self.max_depth,
        }

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]],
                  backend: ScalarBackend = RATIONAL) -> "CounterexampleOptions":
        data = data or {}
        case = data.get("case")
        q = data.get("q")
        try:
            return cls(
                target_z=backend.coerce(data.get("target_z", "1/2")),
                q=backend.coerce(q) if q is not None else None,
                depth=int(data.get("depth", 8)),
                case=None if case in (None, "auto") else CaseKind.parse(case),
                max_family_depth=int(data.get("max_family_depth", 4096)),
                max_depth=int(data["max_depth"]) if data.get("max_depth") is not None else None,
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, InvalidSpec):
                raise
            raise InvalidSpec(f"Invalid counterexample options: {e}") from e


@dataclass
class RayMapping:
    """F on the ray {r h : r >= 0}, piecewise affine between the knots

    Mutable only through lazy deepening, which holds `lock`. `interpolant`
    and `evaluations` are derived from the nodes and reset with them.
    """
    case: CaseTag
    knots_t: Tuple[Scalar, ...]
    node_vectors: Tuple[TruncatedVector, ...]
    plan: InterpolationPlan
    family_ref: FamilySpec
    generator: DualFunctional
    raw_probe: DualFunctional
    options: CounterexampleOptions
    max_depth: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)
    interpolant: Optional[SupOfLines] = field(default=None, repr=False, compare=False)
    evaluations: Dict[Scalar, TruncatedVector] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.max_depth = max(self.max_depth, len(self.knots_t))

    @property
    def depth(self) -> int:
        return len(self.knots_t)

    @property
    def smallest_knot(self) -> Scalar:
        return self.knots_t[-1]

    def replace_nodes(self, other: "RayMapping"):
        """Adopt the deeper construction of `other`"""
        self.case = other.case
        self.knots_t = other.knots_t
        self.node_vectors = other.node_vectors
        self.plan = other.plan
        self.family_ref = other.family_ref
        self.generator = other.generator
        self.interpolant = other.interpolant
        self.evaluations = {}


@dataclass(frozen=True)
class DifferenceQuotientTrace:
    """q(t_k) = F(t_k h) / t_k at selected knots, with pairwise sup-norm gaps"""
    ks: Tuple[int, ...]
    indices: Tuple[int, ...]
    ts: Tuple[Scalar, ...]
    quotients: Tuple[TruncatedVector, ...]
    scalarized: Tuple[Scalar, ...]
    pairwise_norm_gaps: Tuple[Tuple[Scalar, ...], ...]

    def __len__(self) -> int:
        return len(self.ts)

    def gap(self, i: int, j: int) -> Scalar:
        return self.pairwise_norm_gaps[i][j]

    def csv_rows(self) -> List[List[str]]:
        rows = [["k", "m_k", "t_k", "scalarized", "gap_to_previous"]]
        for pos, (k, m, t, s) in enumerate(zip(self.ks, self.indices, self.ts, self.scalarized)):
            gap = format_scalar(self.gap(pos, pos - 1)) if pos else ""
            rows.append([str(k), str(m), format_scalar(t), format_scalar(s), gap])
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ks": list(self.ks),
            "indices": list(self.indices),
            "ts": [format_scalar(t) for t in self.ts],
            "scalarized": [format_scalar(s) for s in self.scalarized],
            "pairwise_norm_gaps": [[format_scalar(g) for g in row] for row in self.pairwise_norm_gaps],
        }


@dataclass(frozen=True)
class HalfSpaceHost:
    """Coordinate space R^dimension with H = {x : <x, h> >= 0}"""
    dimension: int
    direction_h: Tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "direction_h", tuple(self.direction_h))
        if self.dimension < 1:
            raise InvalidSpec(f"Dimension must be positive, got {self.dimension}")
        if len(self.direction_h) != self.dimension:
            raise InvalidSpec(
                f"Direction has {len(self.direction_h)} coordinates, dimension is {self.dimension}"
            )
        norm_sq = sum(c * c for c in self.direction_h)
        if isinstance(norm_sq, float):
            unit = abs(norm_sq - 1) <= FLOAT_IDENTITY_TOLERANCE
        else:
            unit = norm_sq == 1
        if not unit:
            raise InvalidSpec(f"Direction must have unit Euclidean norm, |h|^2 = {norm_sq}")

    @classmethod
    def axis(cls, dimension: int = 5, backend: ScalarBackend = RATIONAL) -> "HalfSpaceHost":
        """h = e_1"""
        h = [backend.zero] * dimension
        h[0] = backend.one
        return cls(dimension, tuple(h))

    def inner(self, x: Sequence[Scalar]) -> Scalar:
        if len(x) != self.dimension:
            raise InvalidSpec(f"Point has {len(x)} coordinates, dimension is {self.dimension}")
        return sum((a * b for a, b in zip(x, self.direction_h)), 0)

    def contains(self, x: Sequence[Scalar]) -> bool:
        return self.inner(x) >= 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "direction_h": [format_scalar(c) for c in self.direction_h],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], backend: ScalarBackend = RATIONAL) -> "HalfSpaceHost":
        if "direction_h" not in data:
            return cls.axis(int(data.get("dimension", 5)), backend)
        h = tuple(backend.coerce_all(data["direction_h"]))
        return cls(int(data.get("dimension", len(h))), h)


@dataclass(frozen=True)
class ExtendedMapping:
    """F-bar(x) = F(<x, h>) on the half-space H"""
    mapping: RayMapping
    host: HalfSpaceHost
