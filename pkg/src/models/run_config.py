"""Run configuration for one command-line invocation"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.core.errors import ConfigError

MAX_SEED = (1 << 64) - 1


class Command(Enum):
    BUILD_CONVEX = "build-convex"
    COUNTEREXAMPLE = "counterexample"
    VERIFY = "verify"
    EXTEND = "extend"
    DEMO_LINF = "demo-linf"


class Precision(Enum):
    RATIONAL = "rational"
    FLOAT64 = "float64"


class BuildMode(Enum):
    INTEGER_KNOTS = "integer-knots"
    SUP_OF_LINES = "sup-of-lines"
    PLAN = "plan"

    @classmethod
    def parse(cls, text: Any) -> "BuildMode":
        """Mode value or one of its aliases

        Raises:
            ConfigError: unknown mode
        """
        if isinstance(text, cls):
            return text
        normalized = text.strip().lower()
        normalized = BUILD_MODE_ALIASES.get(normalized, normalized)
        for mode in cls:
            if mode.value == normalized:
                return mode
        raise ConfigError(f"Unknown build mode {text!r}; choose from {', '.join(build_mode_choices())}")


BUILD_MODE_ALIASES = {
    "prop41": BuildMode.INTEGER_KNOTS.value,
    "lemma42": BuildMode.SUP_OF_LINES.value,
}


def build_mode_choices() -> List[str]:
    return [m.value for m in BuildMode] + sorted(BUILD_MODE_ALIASES)


ALL_CHECKS = (
    "slopes",
    "interp",
    "nodes",
    "scalarize",
    "convexity",
    "divergence",
    "monotonicity",
    "ray-order",
)


@dataclass
class RunConfig:
    """Everything a run depends on; out_dir never affects artifact bytes"""
    command: Command
    out_dir: Path = Path("data")
    input_path: Optional[Path] = None
    precision: Precision = Precision.RATIONAL
    depth: int = 8
    seed: int = 0
    trials: int = 1000

    # counterexample / extend
    family: str = "c0-partial-sums"
    probe: str = "canonical"
    target_z: Optional[str] = None
    case: str = "auto"
    q: Optional[str] = None
    max_family_depth: int = 4096
    gap_floor: Optional[str] = None

    # build-convex
    mode: BuildMode = BuildMode.PLAN
    sequence: Optional[str] = None
    knots: Optional[str] = None

    # verify
    plan_path: Optional[Path] = None
    checks: List[str] = field(default_factory=lambda: list(ALL_CHECKS))

    # extend
    dimension: int = 5
    direction: Optional[str] = None

    # demo-linf
    n_max: int = 50

    def __post_init__(self):
        if self.depth < 2:
            raise ConfigError(f"depth must be at least 2, got {self.depth}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.trials < 1:
            raise ConfigError(f"trials must be positive, got {self.trials}")
        if self.dimension < 1:
            raise ConfigError(f"dimension must be positive, got {self.dimension}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be positive, got {self.n_max}")
        unknown = [c for c in self.checks if c not in ALL_CHECKS]
        if unknown:
            raise ConfigError(f"Unknown checks {unknown}; choose from {', '.join(ALL_CHECKS)}")

    def to_dict(self) -> Dict[str, Any]:
        """Normalized settings, output directory excluded"""
        data = {
            "command": self.command.value,
            "precision": self.precision.value,
            "depth": self.depth,
            "seed": self.seed,
            "trials": self.trials,
        }
        if self.command in (Command.COUNTEREXAMPLE, Command.EXTEND):
            data.update({
                "family": self.family,
                "probe": self.probe,
                "target_z": self.target_z,
                "case": self.case,
                "q": self.q,
                "max_family_depth": self.max_family_depth,
                "gap_floor": self.gap_floor,
            })
        if self.command is Command.EXTEND:
            data.update({"dimension": self.dimension, "direction": self.direction})
        if self.command is Command.BUILD_CONVEX:
            data.update({
                "mode": self.mode.value,
                "sequence": self.sequence,
                "knots": self.knots,
                "target_z": self.target_z,
                "q": self.q,
                "case": self.case,
            })
        if self.command in (Command.COUNTEREXAMPLE, Command.VERIFY):
            data["checks"] = sorted(self.checks)
        if self.command is Command.DEMO_LINF:
            data["n_max"] = self.n_max
        return data
