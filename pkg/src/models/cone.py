"""Half-space cone generated by one functional, and its dual ray"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

from src.core.errors import InvalidSpec
from src.models.vectors import DualFunctional
from src.utils.scalars import RATIONAL, Scalar, ScalarBackend, format_scalar


@dataclass(frozen=True)
class HalfSpaceCone:
    """K = {y : generator(y) >= -tolerance}

    tolerance is 0 for exact arithmetic; in float mode it is relative to
    max(1, ||generator||_1 * ||y||_inf).
    """
    generator: DualFunctional
    tolerance: Scalar = 0

    def __post_init__(self):
        if self.tolerance < 0:
            raise InvalidSpec(f"Cone tolerance must be nonnegative, got {self.tolerance}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generator": self.generator.to_dict(),
            "tolerance": format_scalar(self.tolerance),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], backend: ScalarBackend = RATIONAL) -> "HalfSpaceCone":
        if not isinstance(data, dict) or "generator" not in data:
            raise InvalidSpec("Cone spec needs a 'generator' field")
        generator = DualFunctional.from_dict(data["generator"], backend)
        return cls(generator, backend.coerce(data.get("tolerance", "0")))


DEFAULT_SCALES = (0, 1, 10)


@dataclass(frozen=True)
class DualRay:
    """K* = {lambda * generator : lambda >= 0}, sampled at a few scales"""
    generator: DualFunctional
    sample_scales: Tuple[Scalar, ...] = DEFAULT_SCALES

    def __post_init__(self):
        object.__setattr__(self, "sample_scales", tuple(self.sample_scales))
        if any(scale < 0 for scale in self.sample_scales):
            raise InvalidSpec("Dual ray scales must be nonnegative")
