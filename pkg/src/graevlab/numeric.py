"""Rational enclosures for irrational quantities.

Every irrational number the package touches is a finite sum of rational
multiples of square roots.  An :class:`Enclosure` holds exact rational lower
and upper bounds, so every comparison is either certain or explicitly
undecided; nothing is ever rounded silently.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

Rational = Union[int, Fraction]

DEFAULT_DIGITS = 50
# Guard bits on top of the requested decimal digits.
_GUARD_BITS = 16


def precision_digits() -> int:
    """Decimal digits used for square-root enclosures (``GRAEV_PRECISION_DIGITS``)."""
    raw = os.environ.get("GRAEV_PRECISION_DIGITS")
    if raw is None:
        return DEFAULT_DIGITS
    digits = int(raw)
    if digits < 20:
        raise ValueError("GRAEV_PRECISION_DIGITS must be at least 20")
    return digits


def precision_bits() -> int:
    return math.ceil(precision_digits() * math.log2(10)) + _GUARD_BITS


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings like ``"3/4"``; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@lru_cache(maxsize=None)
def _sqrt_floor_scaled(p: int, bits: int) -> int:
    """floor(sqrt(p) * 2**bits) for a positive integer p."""
    return math.isqrt(p << (2 * bits))


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, q: Rational) -> "Enclosure":
        q = Fraction(q)
        return cls(q, q)

    @classmethod
    def sqrt_int(cls, p: int) -> "Enclosure":
        """Enclosure of sqrt(p) for a nonnegative integer p."""
        if p < 0:
            raise ValueError("negative radicand")
        r = math.isqrt(p)
        if r * r == p:
            return cls.exact(r)
        bits = precision_bits()
        s = _sqrt_floor_scaled(p, bits)
        return cls(Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits))

    @classmethod
    def sqrt(cls, q: Rational) -> "Enclosure":
        """Enclosure of sqrt(q) for a nonnegative rational; exact for perfect squares."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("negative radicand")
        num, den = q.numerator, q.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return cls.exact(Fraction(rn, rd))
        # sqrt(num/den) = sqrt(num*den)/den
        inner = cls.sqrt_int(num * den)
        return cls(inner.lo / den, inner.hi / den)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def __contains__(self, q) -> bool:
        return self.lo <= Fraction(q) <= self.hi

    def __add__(self, other) -> "Enclosure":
        other = _lift(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other) -> "Enclosure":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Enclosure":
        return _lift(other) - self

    def scale(self, q: Rational) -> "Enclosure":
        q = Fraction(q)
        a, b = self.lo * q, self.hi * q
        return Enclosure(min(a, b), max(a, b))

    def __mul__(self, other) -> "Enclosure":
        if isinstance(other, Enclosure):
            prods = (self.lo * other.lo, self.lo * other.hi,
                     self.hi * other.lo, self.hi * other.hi)
            return Enclosure(min(prods), max(prods))
        return self.scale(other)

    __rmul__ = __mul__

    def __abs__(self) -> "Enclosure":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Fraction(0), max(-self.lo, self.hi))

    def max(self, other) -> "Enclosure":
        other = _lift(other)
        return Enclosure(max(self.lo, other.lo), max(self.hi, other.hi))

    def min(self, other) -> "Enclosure":
        other = _lift(other)
        return Enclosure(min(self.lo, other.lo), min(self.hi, other.hi))

    # Certain comparisons against a rational threshold.
    def certainly_lt(self, q) -> bool:
        return self.hi < _bound(q, upper=False)

    def certainly_le(self, q) -> bool:
        return self.hi <= _bound(q, upper=False)

    def certainly_gt(self, q) -> bool:
        return self.lo > _bound(q, upper=True)

    def certainly_ge(self, q) -> bool:
        return self.lo >= _bound(q, upper=True)

    def to_json(self) -> dict:
        if self.is_exact:
            return {"exact": str(self.lo)}
        return {"lo": str(self.lo), "hi": str(self.hi), "approx": f"{float(self.mid):.17g}"}


def _lift(x) -> Enclosure:
    return x if isinstance(x, Enclosure) else Enclosure.exact(x)


def _bound(q, *, upper: bool) -> Fraction:
    # Comparing against another enclosure: use its pessimistic endpoint.
    if isinstance(q, Enclosure):
        return q.hi if upper else q.lo
    return Fraction(q)
