"""Exact times in the quadratic field Q(sqrt 5).

A :class:`QTime` is ``a + b*sqrt(5)`` with rational ``a`` and ``b``.  All
comparisons are decided with rational arithmetic, so instants such as the
golden ratio never get rounded.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

RationalLike = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are rejected on purpose: every input time must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not times")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE"):
            raise ValueError(f"decimal notation not allowed: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(x: Fraction) -> str:
    """Canonical ``"num/den"`` text, always with an explicit denominator."""
    return f"{x.numerator}/{x.denominator}"


def _sign(a: Fraction, b: Fraction) -> int:
    # sign of a + b*sqrt(5)
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with 5 b^2
    diff = a * a - 5 * b * b
    if diff == 0:  # impossible for rationals since sqrt(5) is irrational
        return 0
    s = 1 if diff > 0 else -1
    return s if a > 0 else -s


class QTime:
    """An element ``a + b*sqrt(5)`` of Q(sqrt 5), used as a point in time."""

    __slots__ = ("a", "b")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0):
        object.__setattr__(self, "a", as_fraction(a))
        object.__setattr__(self, "b", as_fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QTime is immutable")

    @classmethod
    def coerce(cls, value) -> "QTime":
        if isinstance(value, QTime):
            return value
        return cls(as_fraction(value))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return QTime(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return QTime(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return QTime(-self.a, -self.b)

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return QTime(self.a * other.a + 5 * self.b * other.b,
                     self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conjugate(self) -> "QTime":
        return QTime(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if other.b == 0:
            if other.a == 0:
                raise ZeroDivisionError("division by zero time")
            return QTime(self.a / other.a, self.b / other.a)
        n = other.norm()  # nonzero for nonzero elements
        num = self * other.conjugate()
        return QTime(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other / self

    # -- ordering ---------------------------------------------------------
    def sign(self) -> int:
        return _sign(self.a, self.b)

    def compare(self, other) -> int:
        other = QTime.coerce(other)
        return _sign(self.a - other.a, self.b - other.b)

    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return _sign(self.a - other.a, self.b - other.b) < 0

    def __le__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return _sign(self.a - other.a, self.b - other.b) <= 0

    def __gt__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return _sign(self.a - other.a, self.b - other.b) > 0

    def __ge__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return _sign(self.a - other.a, self.b - other.b) >= 0

    # -- conversions ------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(5)

    def __floor__(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        # b*sqrt(5) = sign(b) * sqrt(5 b^2); bracket with an integer sqrt on a
        # common denominator, then settle exactly.
        d = self.a.denominator * self.b.denominator
        big_a = self.a * d
        rad = 5 * (self.b * d) ** 2
        root = math.isqrt(int(rad))
        approx = int(big_a) + (root if self.b > 0 else -root - 1)
        guess = approx // d - 1
        while QTime(guess + 1) <= self:
            guess += 1
        while QTime(guess) > self:
            guess -= 1
        return guess

    def __ceil__(self) -> int:
        f = math.floor(self)
        return f if self == f else f + 1

    def __repr__(self):
        if self.b == 0:
            return f"QTime({self.a})"
        return f"QTime({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt5"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*sqrt5"

    def to_json(self) -> dict:
        return {"a": format_fraction(self.a), "b": format_fraction(self.b)}

    @classmethod
    def from_json(cls, obj) -> "QTime":
        if isinstance(obj, dict):
            return cls(as_fraction(obj["a"]), as_fraction(obj.get("b", 0)))
        return cls(as_fraction(obj))


def _lift(value):
    if isinstance(value, QTime):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return QTime(value)
    return NotImplemented


def compare_qtime(x, y) -> int:
    """Exact three-way comparison: -1, 0 or 1 as ``x <, ==, > y``."""
    return QTime.coerce(x).compare(y)


SQRT5 = QTime(0, 1)
PHI = QTime(Fraction(1, 2), Fraction(1, 2))
ZERO = QTime(0)
