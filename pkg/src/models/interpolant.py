"""Sup-of-lines interpolants, case tags and knot/value plans"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from src.core.errors import BadCase, InvalidSpec
from src.utils.scalars import RATIONAL, Scalar, ScalarBackend, format_scalar


@dataclass(frozen=True)
class AffinePiece:
    """f(x) = anchor_a + slope * (x - anchor_t)"""
    anchor_t: Scalar
    anchor_a: Scalar
    slope: Scalar

    def __call__(self, x: Scalar) -> Scalar:
        return self.anchor_a + self.slope * (x - self.anchor_t)


@dataclass(frozen=True)
class SupOfLines:
    """Convex g = max of the pieces through consecutive (t_m, a_m), knots decreasing"""
    knots: Tuple[Scalar, ...]
    values: Tuple[Scalar, ...]
    pieces: Tuple[AffinePiece, ...]

    @property
    def smallest_knot(self) -> Scalar:
        return self.knots[-1]

    @property
    def depth(self) -> int:
        return len(self.knots)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "knots": [format_scalar(t) for t in self.knots],
            "values": [format_scalar(a) for a in self.values],
            "slopes": [format_scalar(p.slope) for p in self.pieces],
        }


@dataclass(frozen=True)
class SlopeCheck:
    """Result of a slope chain check; truthy when the chain holds"""
    ok: bool
    index: Optional[int] = None
    slopes: Tuple[Scalar, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class IntegerKnotResult:
    """Integer-knot recurrence output: selected indices, interpolant, zero crossings"""
    indices: Tuple[int, ...]
    interpolant: SupOfLines
    crossings: Tuple[Scalar, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": "integer-knots",
            "indices": list(self.indices),
            "crossings": [format_scalar(x) for x in self.crossings],
            **self.interpolant.to_dict(),
        }


class Direction(Enum):
    NONINCREASING = "nonincreasing"
    INCREASING = "increasing"


class CaseKind(Enum):
    """The four knot/value regimes, keyed by monotonicity and limit side"""
    NONINC_LOW = "NonincLow"
    NONINC_HIGH = "NonincHigh"
    INCR_HIGH = "IncrHigh"
    INCR_LOW = "IncrLow"

    @property
    def number(self) -> int:
        return _CASE_NUMBERS[self]

    @property
    def needs_q(self) -> bool:
        return self in (CaseKind.NONINC_HIGH, CaseKind.INCR_LOW)

    @property
    def nonincreasing(self) -> bool:
        return self in (CaseKind.NONINC_LOW, CaseKind.NONINC_HIGH)

    @classmethod
    def parse(cls, text: Any) -> "CaseKind":
        """Accept 1..4 or a case name, case-insensitive"""
        normalized = str(text).strip().lower()
        for kind in cls:
            if normalized in (str(kind.number), kind.value.lower(), kind.name.lower()):
                return kind
        raise BadCase(f"Unknown case {text!r}; expected 1-4 or one of "
                      f"{', '.join(k.value for k in cls)}")

    @classmethod
    def classify(cls, direction: Direction, z: Scalar) -> "CaseKind":
        if direction is Direction.NONINCREASING:
            return cls.NONINC_LOW if z < 1 else cls.NONINC_HIGH
        return cls.INCR_LOW if z < 1 else cls.INCR_HIGH


_CASE_NUMBERS = {
    CaseKind.NONINC_LOW: 1,
    CaseKind.NONINC_HIGH: 2,
    CaseKind.INCR_HIGH: 3,
    CaseKind.INCR_LOW: 4,
}


@dataclass(frozen=True)
class CaseTag:
    """Case of a plan; q is present exactly for NonincHigh and IncrLow"""
    kind: CaseKind
    q: Optional[Scalar] = None

    def __post_init__(self):
        if self.kind.needs_q and self.q is None:
            raise InvalidSpec(f"Case {self.kind.value} needs a q parameter")
        if not self.kind.needs_q and self.q is not None:
            object.__setattr__(self, "q", None)

    @property
    def number(self) -> int:
        return self.kind.number

    def node_factor(self) -> Scalar:
        """kappa with F(t_k h) = kappa * t_k * y_{m_k}"""
        if self.kind is CaseKind.NONINC_LOW:
            return 1
        if self.kind is CaseKind.NONINC_HIGH:
            return 1 / self.q
        if self.kind is CaseKind.INCR_HIGH:
            return -1
        return -1 / self.q

    def __str__(self) -> str:
        if self.q is None:
            return self.kind.value
        return f"{self.kind.value}(q={format_scalar(self.q)})"


@dataclass(frozen=True)
class InterpolationPlan:
    """Knots t_k decreasing to 0 and values a_k per case, with the selected indices"""
    case: CaseTag
    limit_z: Scalar
    scale_c: Scalar
    sub_indices: Tuple[int, ...]
    knots_t: Tuple[Scalar, ...]
    values_a: Tuple[Scalar, ...]
    thresholds: Tuple[Scalar, ...] = ()
    selected_values: Tuple[Scalar, ...] = ()
    dropped: int = 0
    constant: bool = False

    @property
    def depth(self) -> int:
        return len(self.knots_t)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.case.kind.value,
            "case_number": self.case.number,
            "q": format_scalar(self.case.q) if self.case.q is not None else None,
            "c": format_scalar(self.scale_c),
            "z": format_scalar(self.limit_z),
            "indices": list(self.sub_indices),
            "knots": [format_scalar(t) for t in self.knots_t],
            "values": [format_scalar(a) for a in self.values_a],
            "thresholds": [format_scalar(c) for c in self.thresholds],
            "selected_values": [format_scalar(z) for z in self.selected_values],
            "dropped": self.dropped,
            "constant": self.constant,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], backend: ScalarBackend = RATIONAL) -> "InterpolationPlan":
        try:
            kind = CaseKind.parse(data["case"])
            q = data.get("q")
            tag = CaseTag(kind, backend.coerce(q) if q is not None else None)
            return cls(
                case=tag,
                limit_z=backend.coerce(data["z"]),
                scale_c=backend.coerce(data.get("c", 1)),
                sub_indices=tuple(int(m) for m in data["indices"]),
                knots_t=tuple(backend.coerce_all(data["knots"])),
                values_a=tuple(backend.coerce_all(data["values"])),
                thresholds=tuple(backend.coerce_all(data.get("thresholds", []))),
                selected_values=tuple(backend.coerce_all(data.get("selected_values", []))),
                dropped=int(data.get("dropped", 0)),
                constant=bool(data.get("constant", False)),
            )
        except KeyError as e:
            raise InvalidSpec(f"Plan is missing field {e}") from e

    def csv_rows(self) -> List[List[str]]:
        """k, m_k, t_k, a_k, C (C blank for the two seed knots and constant plans)"""
        rows = [["k", "m_k", "t_k", "a_k", "C"]]
        offset = self.depth - len(self.thresholds)
        for k, (m, t, a) in enumerate(zip(self.sub_indices, self.knots_t, self.values_a), 1):
            threshold = ""
            if k > offset:
                threshold = format_scalar(self.thresholds[k - offset - 1])
            rows.append([str(k), str(m), format_scalar(t), format_scalar(a), threshold])
        return rows


@dataclass(frozen=True)
class MonotoneSelection:
    """Indices (0-based) of a monotone subsequence and its direction"""
    indices: Tuple[int, ...]
    direction: Direction

    def __iter__(self):
        return iter((self.indices, self.direction))
