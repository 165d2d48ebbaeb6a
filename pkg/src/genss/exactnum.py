"""Complex scalars with exact rational parts and a graceful float fallback.

All symbolic layers of the package carry their numbers as :class:`CNum`.
Rational inputs (ints, Fractions, decimal literals) stay exact, so paper
formulas reproduce bit-for-bit; anything built from floating data degrades
to floats and is compared with a relative tolerance downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

RealLike = Union[int, float, Fraction]
CNumLike = Union["CNum", int, float, complex, Fraction]


def _part(x: RealLike):
    """Normalize one real component: exact kinds become Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def _sqrt_fraction(q: Fraction):
    """Exact square root of a nonnegative Fraction, or None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class CNum:
    """Complex number whose parts are Fractions (exact) or floats."""

    re: Union[Fraction, float] = Fraction(0)
    im: Union[Fraction, float] = Fraction(0)

    @staticmethod
    def make(re: RealLike = 0, im: RealLike = 0) -> "CNum":
        return CNum(_part(re), _part(im))

    @staticmethod
    def from_value(x: CNumLike) -> "CNum":
        if isinstance(x, CNum):
            return x
        if isinstance(x, complex):
            return CNum(float(x.real), float(x.imag))
        return CNum.make(x)

    # -- predicates -------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return isinstance(self.re, Fraction) and isinstance(self.im, Fraction)

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: CNumLike) -> "CNum":
        o = CNum.from_value(other)
        return CNum(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "CNum":
        return CNum(-self.re, -self.im)

    def __sub__(self, other: CNumLike) -> "CNum":
        return self + (-CNum.from_value(other))

    def __rsub__(self, other: CNumLike) -> "CNum":
        return CNum.from_value(other) + (-self)

    def __mul__(self, other: CNumLike) -> "CNum":
        o = CNum.from_value(other)
        return CNum(self.re * o.re - self.im * o.im,
                    self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: CNumLike) -> "CNum":
        o = CNum.from_value(other)
        norm = o.re * o.re + o.im * o.im
        if norm == 0:
            raise ZeroDivisionError("division by zero CNum")
        return CNum((self.re * o.re + self.im * o.im) / norm,
                    (self.im * o.re - self.re * o.im) / norm)

    def __rtruediv__(self, other: CNumLike) -> "CNum":
        return CNum.from_value(other) / self

    def __pow__(self, n: int) -> "CNum":
        if n < 0:
            return CNum.make(1) / self ** (-n)
        out = CNum.make(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "CNum":
        return CNum(self.re, -self.im)

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __eq__(self, other) -> bool:
        if isinstance(other, (CNum, int, float, complex, Fraction)):
            o = CNum.from_value(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self) -> int:
        # Fraction(1, 2) and 0.5 hash (and compare) equal in Python.
        return hash((self.re, self.im))

    # -- misc ---------------------------------------------------------------

    def sqrt_exact(self):
        """Exact complex square root when one exists over the rationals."""
        if not self.is_exact:
            return None
        if self.im == 0:
            if self.re >= 0:
                r = _sqrt_fraction(self.re)
                return CNum(r, Fraction(0)) if r is not None else None
            r = _sqrt_fraction(-self.re)
            return CNum(Fraction(0), r) if r is not None else None
        # general case: (c + di)^2 = a + bi with rational c, d
        mod2 = _sqrt_fraction(self.re * self.re + self.im * self.im)
        if mod2 is None:
            return None
        c2 = (self.re + mod2) / 2
        c = _sqrt_fraction(c2)
        if c is None or c == 0:
            return None
        return CNum(c, self.im / (2 * c))

    def close_to(self, other: CNumLike, tol: float = 1e-12) -> bool:
        o = CNum.from_value(other)
        scale = max(1.0, abs(self), abs(o))
        return abs(self - o) <= tol * scale

    def __repr__(self) -> str:
        if self.im == 0:
            return f"CNum({self.re})"
        return f"CNum({self.re}, {self.im})"


ZERO = CNum.make(0)
ONE = CNum.make(1)
I = CNum.make(0, 1)
HALF = CNum.make(Fraction(1, 2))
