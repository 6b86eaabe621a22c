"""Scalar backends: exact rationals and binary floats"""

import math
import sys
from fractions import Fraction
from numbers import Rational, Real
from typing import Any, Iterable, List, Union

from src.core.errors import InvalidSpec

Scalar = Union[Fraction, float, int]

# Knots below this magnitude are rejected in float64 mode
FLOAT_UNDERFLOW = 2.0 ** -960

# Relative tolerance for float64 order checks
FLOAT_ORDER_TOLERANCE = 2.0 ** -40

# Relative tolerance for float64 equality checks (identities, node values)
FLOAT_IDENTITY_TOLERANCE = 1e-12


def allow_long_integers():
    """Lift the int/str conversion digit limit; deep exact knots have millions of digits"""
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)


allow_long_integers()


def to_fraction(value: Any) -> Fraction:
    """Convert ints, floats, Fractions, "p/q" and decimal strings to a Fraction

    Floats go through their repr so that 0.1 becomes 1/10 rather than the
    nearest binary value.
    """
    if isinstance(value, bool):
        raise InvalidSpec(f"Boolean is not a scalar: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise InvalidSpec(f"Non-finite scalar: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidSpec(f"Cannot parse scalar {value!r}: {e}") from e
    raise InvalidSpec(f"Unsupported scalar type {type(value).__name__}: {value!r}")


class ScalarBackend:
    """Arithmetic policy shared by every operation of a run"""

    name = "abstract"
    exact = False

    def coerce(self, value: Any) -> Scalar:
        raise NotImplementedError

    def coerce_all(self, values: Iterable[Any]) -> List[Scalar]:
        return [self.coerce(v) for v in values]

    def format(self, value: Scalar) -> str:
        raise NotImplementedError

    def equal(self, left: Scalar, right: Scalar) -> bool:
        """Identity check: exact for rationals, relative 1e-12 for floats"""
        raise NotImplementedError

    @property
    def zero(self) -> Scalar:
        return self.coerce(0)

    @property
    def one(self) -> Scalar:
        return self.coerce(1)

    @property
    def order_tolerance(self) -> Scalar:
        return self.coerce(0)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}()"


class RationalBackend(ScalarBackend):
    """Exact arithmetic with fractions.Fraction"""

    name = "rational"
    exact = True

    def coerce(self, value: Any) -> Fraction:
        return to_fraction(value)

    def format(self, value: Scalar) -> str:
        return str(to_fraction(value))

    def equal(self, left: Scalar, right: Scalar) -> bool:
        return left == right


class FloatBackend(ScalarBackend):
    """IEEE-754 double precision"""

    name = "float64"
    exact = False

    def coerce(self, value: Any) -> float:
        if isinstance(value, float):
            return value
        if isinstance(value, Real) and not isinstance(value, bool):
            return float(value)
        return float(to_fraction(value))

    def format(self, value: Scalar) -> str:
        return repr(float(value))

    def equal(self, left: Scalar, right: Scalar) -> bool:
        scale = max(1.0, abs(left), abs(right))
        return abs(left - right) <= FLOAT_IDENTITY_TOLERANCE * scale

    @property
    def order_tolerance(self) -> float:
        return FLOAT_ORDER_TOLERANCE


RATIONAL = RationalBackend()
FLOAT64 = FloatBackend()

_BACKENDS = {
    "rational": RATIONAL,
    "float64": FLOAT64,
    "float": FLOAT64,
}


def get_backend(name: str) -> ScalarBackend:
    """Look up a backend by precision name"""
    try:
        return _BACKENDS[name.lower()]
    except KeyError:
        raise InvalidSpec(f"Unknown precision {name!r}; expected 'rational' or 'float64'")


def backend_of(value: Scalar) -> ScalarBackend:
    """Infer the backend from a scalar value"""
    return FLOAT64 if isinstance(value, float) else RATIONAL


def format_scalar(value: Scalar) -> str:
    """Serialize a scalar: "p/q" for rationals, repr for floats"""
    return backend_of(value).format(value)


def parse_scalar_list(text: str, backend: ScalarBackend = RATIONAL) -> List[Scalar]:
    """Parse "[1, 1/2, 0.25]" or "1,1/2,0.25" into scalars"""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    items = [item.strip().strip('"').strip("'") for item in body.split(",")]
    items = [item for item in items if item]
    if not items:
        raise InvalidSpec(f"Empty scalar list: {text!r}")
    return [backend.coerce(item) for item in items]


def log_magnitude(value: Scalar) -> float:
    """log |value| without converting huge rationals to float

    Raises:
        ValueError: value is zero
    """
    if isinstance(value, Fraction):
        return math.log(abs(value.numerator)) - math.log(value.denominator)
    return math.log(abs(value))
