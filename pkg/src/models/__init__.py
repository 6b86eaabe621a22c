"""Data models for sequence-space constructions and verification reports"""

from .vectors import (
    DualFunctional,
    FamilyKind,
    FamilySpec,
    SpaceTag,
    TailRule,
    TruncatedVector,
)
from .cone import DualRay, HalfSpaceCone
from .interpolant import (
    AffinePiece,
    CaseKind,
    CaseTag,
    Direction,
    IntegerKnotResult,
    InterpolationPlan,
    MonotoneSelection,
    SlopeCheck,
    SupOfLines,
)
from .mapping import (
    CounterexampleOptions,
    DifferenceQuotientTrace,
    ExtendedMapping,
    HalfSpaceHost,
    RayMapping,
)
from .report import BidualReport, CheckReport, ConvexityReport, ProbeScan, ScanReport
from .run_config import BuildMode, Command, Precision, RunConfig

__all__ = [
    "DualFunctional",
    "FamilyKind",
    "FamilySpec",
    "SpaceTag",
    "TailRule",
    "TruncatedVector",
    "DualRay",
    "HalfSpaceCone",
    "AffinePiece",
    "CaseKind",
    "CaseTag",
    "Direction",
    "IntegerKnotResult",
    "InterpolationPlan",
    "MonotoneSelection",
    "SlopeCheck",
    "SupOfLines",
    "CounterexampleOptions",
    "DifferenceQuotientTrace",
    "ExtendedMapping",
    "HalfSpaceHost",
    "RayMapping",
    "BidualReport",
    "CheckReport",
    "ConvexityReport",
    "ProbeScan",
    "ScanReport",
    "BuildMode",
    "Command",
    "Precision",
    "RunConfig",
]
