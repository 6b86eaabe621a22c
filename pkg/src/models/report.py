"""Report value objects returned by scans and verification checks"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from src.models.vectors import DualFunctional, TruncatedVector
from src.utils.scalars import Scalar, format_scalar


def to_jsonable(value: Any) -> Any:
    """Convert scalars, vectors and nested containers into JSON-ready data"""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (Fraction, float)):
        return format_scalar(value)
    if isinstance(value, int):
        return value
    if isinstance(value, TruncatedVector):
        return value.to_list()
    if isinstance(value, DualFunctional):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return str(value)


@dataclass
class ProbeScan:
    """Pairing values of one probe along a family"""
    values: List[Scalar]
    last_gap: Optional[Scalar]
    limit: Optional[Scalar]
    limit_source: str = "none"  # closed_form | geometric | constant | single | none

    def to_dict(self) -> Dict[str, Any]:
        return {
            "values": to_jsonable(self.values),
            "last_gap": to_jsonable(self.last_gap),
            "limit": to_jsonable(self.limit),
            "limit_source": self.limit_source,
        }


@dataclass
class ScanReport:
    """Evidence gathered by a weak Cauchy scan; never a verdict"""
    probes: List[ProbeScan]
    family_size: int
    gap_floor: Scalar
    min_pairwise_gap: Optional[Scalar] = None
    norm_divergent_candidate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family_size": self.family_size,
            "gap_floor": to_jsonable(self.gap_floor),
            "min_pairwise_gap": to_jsonable(self.min_pairwise_gap),
            "norm_divergent_candidate": self.norm_divergent_candidate,
            "probes": [p.to_dict() for p in self.probes],
        }


@dataclass
class CheckReport:
    """Outcome of one verification check"""
    name: str
    passed: bool = True
    checked: int = 0
    violations: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def record(self, **violation: Any):
        self.passed = False
        self.violations.append(violation)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "violations": to_jsonable(self.violations),
            "details": to_jsonable(self.details),
        }


@dataclass
class ConvexityReport:
    """Three independent K-convexity checks over seeded samples"""
    direct: CheckReport
    scalarized: CheckReport
    epigraph: CheckReport
    seed: int
    trials: int
    depth: int

    @property
    def passed(self) -> bool:
        return self.direct.passed and self.scalarized.passed and self.epigraph.passed

    @property
    def checks(self) -> List[CheckReport]:
        return [self.direct, self.scalarized, self.epigraph]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "trials": self.trials,
            "depth": self.depth,
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass
class BidualReport:
    """Membership versus sampled dual-ray pairings"""
    passed: bool
    checked: int
    counterexamples: List[TruncatedVector] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "counterexamples": to_jsonable(self.counterexamples),
        }
