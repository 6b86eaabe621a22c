"""Error types raised by the construction and verification services"""

from typing import Any, Optional


class ForgeError(ValueError):
    """Base class for every input, construction or evaluation error"""


class ConfigError(ForgeError):
    """Invalid configuration value or command-line combination"""


class InvalidSpec(ForgeError):
    """Malformed family, functional, cone or plan specification"""


class EmptyFamily(ForgeError):
    """A family of depth zero (or an empty explicit family) was requested"""


class MismatchedGenerator(ForgeError):
    """Dual ray and cone are generated by different functionals"""


class NonDecreasingKnots(ForgeError):
    """Knots must be strictly decreasing"""


class SlopeChainViolation(ForgeError):
    """Consecutive slopes are not nonincreasing along the knots"""

    def __init__(self, index: int, message: Optional[str] = None):
        self.index = index
        super().__init__(message or f"Slope chain violated at knot {index}")


class BelowDepth(ForgeError):
    """Evaluation point lies below the deepest constructed knot"""

    def __init__(self, r: Any, smallest_knot: Any):
        self.r = r
        self.smallest_knot = smallest_knot
        super().__init__(f"r={r} is below the smallest knot {smallest_knot}")


class ZeroSlope(ForgeError):
    """A horizontal positive piece has no zero crossing"""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Piece {index} is horizontal; no zero crossing exists")


class InvalidSequence(ForgeError):
    """Input sequence violates the preconditions of a construction"""


class ZeroLimit(ForgeError):
    """The probe values tend to zero, so no rescaling can make them positive"""


class UnsupportedLimit(ForgeError):
    """Limit z must lie in (0, 1) or (1, inf)"""


class BadQ(ForgeError):
    """Parameter q violates the constraint of its case"""


class BadCase(ForgeError):
    """Requested case does not match the direction and limit of the values"""


class PrefixNotDropped(ForgeError):
    """Too few usable terms remain after dropping the offending prefix"""

    def __init__(self, dropped: int, usable: int):
        self.dropped = dropped
        self.usable = usable
        super().__init__(
            f"Only {usable} usable terms remain after dropping {dropped}; need at least 3"
        )


class DepthExhausted(ForgeError):
    """The supplied values ran out before enough knots were selected"""

    def __init__(self, selected: int, requested: int):
        self.selected = selected
        self.requested = requested
        super().__init__(f"Selected {selected} of {requested} requested knots")


class TooShort(ForgeError):
    """A trace needs at least two entries"""


class OutsideDomain(ForgeError):
    """Point lies outside the half-space domain of the extension"""

    def __init__(self, inner: Any):
        self.inner = inner
        super().__init__(f"<x, h> = {inner} < 0: point outside the half-space")


class Underflow(ForgeError):
    """Float knot magnitude fell below the underflow-safe threshold"""

    def __init__(self, value: Any):
        self.value = value
        super().__init__(f"Knot {value!r} is below 2^-960; use rational precision")
