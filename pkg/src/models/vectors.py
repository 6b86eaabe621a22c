"""Truncated sequence-space vectors, l1 functionals and family specifications"""

import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import islice
from typing import Any, Dict, Iterator, List, Sequence, Tuple

from src.core.errors import InvalidSpec
from src.utils.scalars import RATIONAL, Scalar, ScalarBackend, format_scalar

_ZERO = 0


class SpaceTag(Enum):
    """Ambient sequence space a truncation is meant to live in"""
    C0 = "c0"
    LINF = "linf"


class FamilyKind(Enum):
    """Canonical weak Cauchy families"""
    C0_PARTIAL_SUMS = "c0_partial_sums"
    LINF_NEG_PREFIX = "linf_neg_prefix"
    EXPLICIT = "explicit"

    @classmethod
    def parse(cls, text: str) -> "FamilyKind":
        normalized = text.strip().lower().replace("-", "_")
        for kind in cls:
            if kind.value == normalized:
                return kind
        raise InvalidSpec(f"Unknown family kind {text!r}")


@dataclass(frozen=True)
class TruncatedVector:
    """Finitely supported element of c0 or l-infinity with an implicit zero tail

    Trailing zeros are stripped on construction, so two truncations of the
    same element compare equal regardless of the window they were cut from.
    """
    coords: Tuple[Scalar, ...] = ()
    space_tag: SpaceTag = field(default=SpaceTag.C0, compare=False)

    def __post_init__(self):
        coords = tuple(self.coords)
        end = len(coords)
        while end and coords[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coords", coords[:end])

    @classmethod
    def zero(cls, space_tag: SpaceTag = SpaceTag.C0) -> "TruncatedVector":
        return cls((), space_tag)

    @classmethod
    def constant_prefix(cls, value: Scalar, length: int,
                        space_tag: SpaceTag = SpaceTag.C0) -> "TruncatedVector":
        """Vector with `value` in the first `length` coordinates"""
        return cls((value,) * length, space_tag)

    def __len__(self) -> int:
        return len(self.coords)

    def coordinate(self, index: int) -> Scalar:
        """0-based coordinate, zero beyond the stored support"""
        if index < len(self.coords):
            return self.coords[index]
        return _ZERO

    def sup_norm(self) -> Scalar:
        if not self.coords:
            return _ZERO
        distinct = {id(c): c for c in self.coords}
        return max(abs(c) for c in distinct.values())

    def combine(self, alpha: Scalar, other: "TruncatedVector", beta: Scalar) -> "TruncatedVector":
        """alpha * self + beta * other, coordinate-wise

        Constructed vectors repeat the same scalar objects across long
        prefixes, so each distinct coordinate pair is computed once.
        """
        length = max(len(self.coords), len(other.coords))
        cache: Dict[Tuple[int, int], Scalar] = {}
        out = []
        for i in range(length):
            left = self.coordinate(i)
            right = other.coordinate(i)
            key = (id(left), id(right))
            value = cache.get(key)
            if value is None:
                value = alpha * left + beta * right
                cache[key] = value
            out.append(value)
        return TruncatedVector(tuple(out), self.space_tag)

    def scale(self, alpha: Scalar) -> "TruncatedVector":
        cache: Dict[int, Scalar] = {}
        out = []
        for c in self.coords:
            value = cache.get(id(c))
            if value is None:
                value = alpha * c
                cache[id(c)] = value
            out.append(value)
        return TruncatedVector(tuple(out), self.space_tag)

    def __add__(self, other: "TruncatedVector") -> "TruncatedVector":
        return self.combine(1, other, 1)

    def __sub__(self, other: "TruncatedVector") -> "TruncatedVector":
        return self.combine(1, other, -1)

    def __neg__(self) -> "TruncatedVector":
        return self.scale(-1)

    def to_list(self) -> List[str]:
        return [format_scalar(c) for c in self.coords]

    @classmethod
    def from_list(cls, values: Sequence[Any], backend: ScalarBackend = RATIONAL,
                  space_tag: SpaceTag = SpaceTag.C0) -> "TruncatedVector":
        return cls(tuple(backend.coerce(v) for v in values), space_tag)


@dataclass(frozen=True)
class TailRule:
    """Coefficient rule beyond the explicit head of a functional"""
    rule: str = "zero"
    ratio: Scalar = 0
    start: Scalar = 0

    def __post_init__(self):
        if self.rule not in ("zero", "geometric"):
            raise InvalidSpec(f"Unknown tail rule {self.rule!r}")
        if self.rule == "geometric" and not abs(self.ratio) < 1:
            raise InvalidSpec(f"Geometric tail needs |ratio| < 1, got {self.ratio}")

    @classmethod
    def geometric(cls, ratio: Scalar, start: Scalar) -> "TailRule":
        return cls("geometric", ratio, start)

    @property
    def is_geometric(self) -> bool:
        return self.rule == "geometric" and self.start != 0

    def to_dict(self) -> Dict[str, Any]:
        if self.rule == "zero":
            return {"rule": "zero"}
        return {
            "rule": "geometric",
            "ratio": format_scalar(self.ratio),
            "start": format_scalar(self.start),
        }


ZERO_TAIL = TailRule()


@dataclass(frozen=True)
class DualFunctional:
    """l1 representer: explicit head coefficients plus a zero or geometric tail"""
    head: Tuple[Scalar, ...] = ()
    tail: TailRule = ZERO_TAIL
    _prefix_sums: List[Scalar] = field(default_factory=lambda: [_ZERO], init=False, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))

    def partial_sum(self, start: int, end: int) -> Scalar:
        """Sum of the 0-based coefficients start .. end - 1

        Prefix sums are cached and grown by doubling; the lock keeps
        concurrent checks from extending them twice.
        """
        sums = self._prefix_sums
        if end >= len(sums):
            with self._lock:
                if end >= len(sums):
                    target = max(end, 2 * (len(sums) - 1))
                    running = sums[-1]
                    for c in islice(self.coefficients(target), len(sums) - 1, None):
                        running = running + c
                        sums.append(running)
        return sums[end] - sums[start]

    def coefficient(self, index: int) -> Scalar:
        """0-based coefficient"""
        if index < len(self.head):
            return self.head[index]
        if self.tail.rule == "zero":
            return _ZERO
        return self.tail.start * self.tail.ratio ** (index - len(self.head))

    def coefficients(self, count: int) -> Iterator[Scalar]:
        """First `count` coefficients, tail terms generated by repeated multiplication"""
        for i in range(min(count, len(self.head))):
            yield self.head[i]
        if count <= len(self.head):
            return
        if self.tail.rule == "zero":
            for _ in range(count - len(self.head)):
                yield _ZERO
            return
        term = self.tail.start
        for _ in range(count - len(self.head)):
            yield term
            term = term * self.tail.ratio

    def l1_norm(self) -> Scalar:
        norm = sum((abs(c) for c in self.head), _ZERO)
        if self.tail.rule == "geometric":
            norm = norm + abs(self.tail.start) / (1 - abs(self.tail.ratio))
        return norm

    def coefficient_sum(self) -> Scalar:
        """Closed-form sum of all coefficients"""
        total = sum(self.head, _ZERO)
        if self.tail.rule == "geometric":
            total = total + self.tail.start / (1 - self.tail.ratio)
        return total

    def scaled(self, factor: Scalar) -> "DualFunctional":
        tail = self.tail
        if tail.rule == "geometric":
            tail = replace(tail, start=tail.start * factor)
        return DualFunctional(tuple(c * factor for c in self.head), tail)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "head": [format_scalar(c) for c in self.head],
            "tail": self.tail.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], backend: ScalarBackend = RATIONAL) -> "DualFunctional":
        if not isinstance(data, dict):
            raise InvalidSpec(f"Functional must be a mapping, got {type(data).__name__}")
        head = tuple(backend.coerce(v) for v in data.get("head", []))
        tail_data = data.get("tail") or {"rule": "zero"}
        rule = tail_data.get("rule", "zero")
        if rule == "zero":
            return cls(head, ZERO_TAIL)
        if rule == "geometric":
            try:
                ratio = backend.coerce(tail_data["ratio"])
                start = backend.coerce(tail_data["start"])
            except KeyError as e:
                raise InvalidSpec(f"Geometric tail missing field {e}") from e
            return cls(head, TailRule.geometric(ratio, start))
        raise InvalidSpec(f"Unknown tail rule {rule!r}")


@dataclass(frozen=True)
class FamilySpec:
    """Which weak Cauchy family to generate and how many members"""
    kind: FamilyKind
    depth: int
    vectors: Tuple[TruncatedVector, ...] = ()

    def __post_init__(self):
        if isinstance(self.depth, bool) or not isinstance(self.depth, int) or self.depth < 0:
            raise InvalidSpec(f"Family depth must be a nonnegative integer, got {self.depth!r}")
        object.__setattr__(self, "vectors", tuple(self.vectors))
        if self.kind is FamilyKind.EXPLICIT and self.depth > len(self.vectors):
            raise InvalidSpec(
                f"Explicit family has {len(self.vectors)} vectors, depth {self.depth} requested"
            )

    def with_depth(self, depth: int) -> "FamilySpec":
        if self.kind is FamilyKind.EXPLICIT:
            depth = min(depth, len(self.vectors))
        return replace(self, depth=depth)

    @property
    def has_fixed_supply(self) -> bool:
        return self.kind is FamilyKind.EXPLICIT

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "depth": self.depth}
        if self.kind is FamilyKind.EXPLICIT:
            data["vectors"] = [v.to_list() for v in self.vectors]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], backend: ScalarBackend = RATIONAL) -> "FamilySpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise InvalidSpec("Family spec needs a 'kind' field")
        kind = FamilyKind.parse(str(data["kind"]))
        vectors: Tuple[TruncatedVector, ...] = ()
        if kind is FamilyKind.EXPLICIT:
            vectors = tuple(TruncatedVector.from_list(v, backend) for v in data.get("vectors", []))
        depth = data.get("depth", len(vectors))
        try:
            depth = int(depth)
        except (TypeError, ValueError) as e:
            raise InvalidSpec(f"Family depth must be an integer, got {depth!r}") from e
        return cls(kind, depth, vectors)
