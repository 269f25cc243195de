"""Scalar backends: exact rationals or IEEE doubles compared with a tolerance."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .config import EPSILON
from .errors import MalformedInput

Number = Union[Fraction, int, float]
Vec = tuple[Number, Number]


@dataclass(frozen=True)
class Backend:
    name: str
    eps: float

    @property
    def exact(self) -> bool:
        return self.eps == 0

    def coerce(self, value: Number) -> Number:
        if self.exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            # floats convert through their shortest repr so 0.1 stays 1/10
            return Fraction(repr(float(value)))
        return float(value)

    def sign(self, value: Number) -> int:
        if value > self.eps:
            return 1
        if value < -self.eps:
            return -1
        return 0

    def is_zero(self, value: Number) -> bool:
        return self.sign(value) == 0

    def eq(self, a: Number, b: Number) -> bool:
        return self.sign(a - b) == 0

    def lt(self, a: Number, b: Number) -> bool:
        return self.sign(b - a) > 0

    def sqrt(self, value: Number) -> Number:
        """Exact square root when ``value`` is a rational square, float otherwise."""

        if self.exact:
            root = exact_sqrt(Fraction(value))
            if root is not None:
                return root
        return math.sqrt(float(value))


EXACT = Backend("exact", 0.0)
FLOAT = Backend("float", EPSILON)
BACKENDS = {"exact": EXACT, "float": FLOAT}


def get_backend(name: str | Backend) -> Backend:
    if isinstance(name, Backend):
        return name
    try:
        return BACKENDS[str(name).strip().lower()]
    except KeyError:
        raise MalformedInput(f"unknown backend {name!r}", choices=sorted(BACKENDS)) from None


def exact_sqrt(value: Fraction) -> Fraction | None:
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def parse_scalar(raw: object, backend: Backend) -> Number:
    """Parse a JSON/CLI scalar: a number or a string such as ``"3/4"`` or ``"0.25"``."""

    if isinstance(raw, bool):
        raise MalformedInput(f"expected a number, got {raw!r}")
    if isinstance(raw, (int, float, Fraction)):
        if isinstance(raw, float) and not math.isfinite(raw):
            raise MalformedInput(f"non-finite coordinate {raw!r}")
        return backend.coerce(raw)
    if isinstance(raw, str):
        text = raw.strip()
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"cannot parse scalar {raw!r}") from None
        return value if backend.exact else float(value)
    raise MalformedInput(f"expected a number or 'p/q' string, got {type(raw).__name__}")


def format_scalar(value: Number) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def cross(a: Vec, b: Vec) -> Number:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Vec, b: Vec) -> Number:
    return a[0] * b[0] + a[1] * b[1]


def sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def reflect(direction: Vec, axis: Vec) -> Vec:
    """Mirror ``direction`` across the line spanned by ``axis``; rational in, rational out."""

    k = 2 * dot(direction, axis) / dot(axis, axis)
    return (k * axis[0] - direction[0], k * axis[1] - direction[1])


def angle_of(vector: Vec) -> float:
    """Direction angle in [0, 2π)."""

    theta = math.atan2(float(vector[1]), float(vector[0]))
    return theta + 2 * math.pi if theta < 0 else theta


__all__ = [
    "BACKENDS",
    "EXACT",
    "FLOAT",
    "Backend",
    "Number",
    "Vec",
    "angle_of",
    "cross",
    "dot",
    "exact_sqrt",
    "format_scalar",
    "get_backend",
    "parse_scalar",
    "reflect",
    "sub",
]
