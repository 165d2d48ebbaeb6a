"""Symbolic algebra of generalized functions over a closed kernel class.

A :class:`Dist` is a finite GenScalar-weighted sum of canonical kernels:

* ``DeltaDeriv(n)``        delta^(n)(t)
* ``CutExpPoly(m, lam)``   H(t) t^m e^(lam t)      (supported on [0, oo))
* ``SmoothExpPoly(m, lam)``       t^m e^(lam t)    (whole line, smooth)

Trigonometric kernels are stored as conjugate pairs of complex-rate
exponentials; rendering recombines them.  The class is closed under
differentiation, convolution of half-line members, and point evaluation
at the origin (which is where all the interesting constants live).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import UnsupportedConvolution
from .exactnum import CNum, CNumLike
from .scalars import GenScalar, delta_point, odd_cut_atom

KIND_DELTA = "delta"
KIND_CUT = "cut"
KIND_SMOOTH = "smooth"

_KIND_RANK = {KIND_DELTA: 0, KIND_CUT: 1, KIND_SMOOTH: 2}

ScalarLike = Union[GenScalar, CNum, int, float, complex, Fraction]


@dataclass(frozen=True)
class Kernel:
    """One canonical kernel; identity is (kind, power, rate)."""

    kind: str
    power: int = 0              # delta derivative order n, or poly power m
    lam: CNum = CNum.make(0)    # exponential rate (cut/smooth only)

    @staticmethod
    def delta(n: int = 0) -> "Kernel":
        return Kernel(KIND_DELTA, n)

    @staticmethod
    def cut(m: int = 0, lam: CNumLike = 0) -> "Kernel":
        return Kernel(KIND_CUT, m, CNum.from_value(lam))

    @staticmethod
    def smooth(m: int = 0, lam: CNumLike = 0) -> "Kernel":
        return Kernel(KIND_SMOOTH, m, CNum.from_value(lam))

    @property
    def on_halfline(self) -> bool:
        return self.kind in (KIND_DELTA, KIND_CUT)

    def sort_key(self):
        return (_KIND_RANK[self.kind], self.power,
                float(self.lam.re), -float(self.lam.im),
                str(self.lam.re), str(self.lam.im))


@dataclass(frozen=True)
class Dist:
    """Generalized function in normal form: no duplicate kernels, no zeros."""

    terms: Tuple[Tuple[Kernel, GenScalar], ...] = ()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def _from_map(acc: Dict[Kernel, GenScalar]) -> "Dist":
        items = [(k, c) for k, c in acc.items() if not c.is_zero]
        items.sort(key=lambda it: it[0].sort_key())
        return Dist(tuple(items))

    @staticmethod
    def zero() -> "Dist":
        return Dist()

    @staticmethod
    def single(kernel: Kernel, coeff: ScalarLike = 1) -> "Dist":
        c = GenScalar.from_value(coeff)
        if c.is_zero:
            return Dist()
        return Dist(((kernel, c),))

    @staticmethod
    def delta(n: int = 0, coeff: ScalarLike = 1) -> "Dist":
        return Dist.single(Kernel.delta(n), coeff)

    @staticmethod
    def heaviside(coeff: ScalarLike = 1) -> "Dist":
        return Dist.single(Kernel.cut(0, 0), coeff)

    @staticmethod
    def cut_exp(lam: CNumLike, m: int = 0, coeff: ScalarLike = 1) -> "Dist":
        return Dist.single(Kernel.cut(m, lam), coeff)

    @staticmethod
    def smooth_exp(lam: CNumLike, m: int = 0, coeff: ScalarLike = 1) -> "Dist":
        return Dist.single(Kernel.smooth(m, lam), coeff)

    @staticmethod
    def _trig(kind: str, omega: CNumLike, alpha: CNumLike, m: int,
              coeff: ScalarLike, sin: bool) -> "Dist":
        w = CNum.from_value(omega)
        a = CNum.from_value(alpha)
        iw = CNum.make(0, 1) * w
        lam_p, lam_m = -a + iw, -a - iw
        c = GenScalar.from_value(coeff)
        half = CNum.make(Fraction(1, 2))
        if sin:
            cp, cm = CNum.make(0, Fraction(-1, 2)), CNum.make(0, Fraction(1, 2))
        else:
            cp, cm = half, half
        out = Dist.single(Kernel(kind, m, lam_p), c * cp)
        return out + Dist.single(Kernel(kind, m, lam_m), c * cm)

    @staticmethod
    def cut_cos(omega: CNumLike, alpha: CNumLike = 0, m: int = 0,
                coeff: ScalarLike = 1) -> "Dist":
        """H(t) t^m e^(-alpha t) cos(omega t) as a conjugate pair."""
        return Dist._trig(KIND_CUT, omega, alpha, m, coeff, sin=False)

    @staticmethod
    def cut_sin(omega: CNumLike, alpha: CNumLike = 0, m: int = 0,
                coeff: ScalarLike = 1) -> "Dist":
        return Dist._trig(KIND_CUT, omega, alpha, m, coeff, sin=True)

    @staticmethod
    def smooth_cos(omega: CNumLike, alpha: CNumLike = 0, m: int = 0,
                   coeff: ScalarLike = 1) -> "Dist":
        return Dist._trig(KIND_SMOOTH, omega, alpha, m, coeff, sin=False)

    @staticmethod
    def smooth_sin(omega: CNumLike, alpha: CNumLike = 0, m: int = 0,
                   coeff: ScalarLike = 1) -> "Dist":
        return Dist._trig(KIND_SMOOTH, omega, alpha, m, coeff, sin=True)

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "Dist") -> "Dist":
        acc: Dict[Kernel, GenScalar] = dict(self.terms)
        for kernel, coeff in other.terms:
            cur = acc.get(kernel)
            acc[kernel] = coeff if cur is None else cur + coeff
        return Dist._from_map(acc)

    def __neg__(self) -> "Dist":
        return Dist(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: "Dist") -> "Dist":
        return self + (-other)

    def __mul__(self, scalar: ScalarLike) -> "Dist":
        c = GenScalar.from_value(scalar)
        if c.is_zero:
            return Dist()
        acc = {k: coeff * c for k, coeff in self.terms}
        return Dist._from_map(acc)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def supported_on_halfline(self) -> bool:
        return all(k.on_halfline for k, _ in self.terms)

    def coefficient(self, kernel: Kernel) -> GenScalar:
        for k, c in self.terms:
            if k == kernel:
                return c
        return GenScalar()

    # -- calculus -------------------------------------------------------------

    def differentiate(self, times: int = 1) -> "Dist":
        out = self
        for _ in range(times):
            acc: Dict[Kernel, GenScalar] = {}
            for kernel, coeff in out.terms:
                for dk, dc in _kernel_derivative(kernel):
                    cur = acc.get(dk)
                    add = coeff * dc
                    acc[dk] = add if cur is None else cur + add
            out = Dist._from_map(acc)
        return out

    def convolve(self, other: "Dist") -> "Dist":
        """Convolution of half-line members; bilinear in GenScalar weights."""
        for operand in (self, other):
            if not operand.supported_on_halfline:
                raise UnsupportedConvolution(
                    "convolution requires both factors supported on [0, oo)")
        out = Dist()
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                out = out + _kernel_convolve(k1, k2) * (c1 * c2)
        return out

    def eval_at_zero(self) -> GenScalar:
        """Point value at the origin as a generalized scalar."""
        total = GenScalar()
        for kernel, coeff in self.terms:
            total = total + coeff * _kernel_value_at_zero(kernel)
        return total

    def eval_derivs_at_zero(self, count: int) -> List[GenScalar]:
        out = []
        cur = self
        for _ in range(count):
            out.append(cur.eval_at_zero())
            cur = cur.differentiate()
        return out

    # -- comparisons ------------------------------------------------------------

    def close_to(self, other: "Dist", tol: float = 1e-9) -> bool:
        """Normal-form equality up to tol, matching rates fuzzily."""
        remaining = list(other.terms)
        for kernel, coeff in self.terms:
            match = None
            for idx, (k2, c2) in enumerate(remaining):
                if k2.kind == kernel.kind and k2.power == kernel.power and \
                        kernel.lam.close_to(k2.lam, tol):
                    match = idx
                    break
            if match is None:
                if not coeff.close_to(GenScalar(), tol):
                    return False
                continue
            _, c2 = remaining.pop(match)
            if not coeff.close_to(c2, tol):
                return False
        return all(c.close_to(GenScalar(), tol) for _, c in remaining)

    def __repr__(self) -> str:
        from .dsl import render_dist
        try:
            return f"Dist({render_dist(self)})"
        except Exception:
            return f"Dist(terms={self.terms!r})"


# -- kernel-level rules ---------------------------------------------------------

def _kernel_derivative(kernel: Kernel) -> List[Tuple[Kernel, CNum]]:
    if kernel.kind == KIND_DELTA:
        return [(Kernel.delta(kernel.power + 1), CNum.make(1))]
    m, lam = kernel.power, kernel.lam
    out: List[Tuple[Kernel, CNum]] = []
    if kernel.kind == KIND_CUT and m == 0:
        out.append((Kernel.delta(0), CNum.make(1)))
    if m >= 1:
        out.append((Kernel(kernel.kind, m - 1, lam), CNum.make(m)))
    if not lam.is_zero:
        out.append((Kernel(kernel.kind, m, lam), lam))
    return out


def _kernel_convolve(k1: Kernel, k2: Kernel) -> Dist:
    if k1.kind == KIND_DELTA:
        return Dist.single(k2).differentiate(k1.power)
    if k2.kind == KIND_DELTA:
        return Dist.single(k1).differentiate(k2.power)
    m1, l1 = k1.power, k1.lam
    m2, l2 = k2.power, k2.lam
    if l1 == l2:
        # integral of (t-x)^m1 x^m2 dx over [0, t] is a Beta factor
        c = CNum.make(Fraction(factorial(m1) * factorial(m2),
                               factorial(m1 + m2 + 1)))
        return Dist.single(Kernel.cut(m1 + m2 + 1, l1), c)
    # distinct rates: partial fractions of m1! m2! / ((p-l1)^M (p-l2)^N)
    out = Dist()
    scale = CNum.make(factorial(m1) * factorial(m2))
    out = out + _pf_side(l1, m1 + 1, l2, m2 + 1, scale)
    out = out + _pf_side(l2, m2 + 1, l1, m1 + 1, scale)
    return out


def _pf_side(la: CNum, big_m: int, lb: CNum, big_n: int, scale: CNum) -> Dist:
    """Terms at the pole la of 1/((p-la)^M (p-lb)^N), mapped back to kernels."""
    out = Dist()
    diff = la - lb
    for r in range(big_m):
        j = big_m - r
        binom = Fraction(factorial(big_n - 1 + r),
                         factorial(r) * factorial(big_n - 1))
        sign = -1 if r % 2 else 1
        a_j = CNum.make(sign * binom) / diff ** (big_n + r)
        coeff = scale * a_j / CNum.make(factorial(j - 1))
        out = out + Dist.single(Kernel.cut(j - 1, la), coeff)
    return out


def _kernel_value_at_zero(kernel: Kernel) -> GenScalar:
    if kernel.kind == KIND_DELTA:
        return delta_point(kernel.power)
    if kernel.kind == KIND_SMOOTH:
        # pointwise extension of a smooth function: classical value at 0
        return GenScalar.from_value(1 if kernel.power == 0 else 0)
    value = GenScalar.from_value(Fraction(1, 2) if kernel.power == 0 else 0)
    sign, atom = odd_cut_atom(kernel.power, kernel.lam)
    if atom is not None:
        value = value + GenScalar.from_atom(atom, 1, sign)
    return value


# -- spec-surface names ----------------------------------------------------------

def differentiate(f: Dist, times: int = 1) -> Dist:
    return f.differentiate(times)


def convolve(t: Dist, f: Dist) -> Dist:
    return t.convolve(f)


def eval_at_zero(f: Dist) -> GenScalar:
    return f.eval_at_zero()


def eval_derivs_at_zero(f: Dist, count: int) -> List[GenScalar]:
    return f.eval_derivs_at_zero(count)


def render(f: Dist, fmt: str = "text") -> str:
    from .dsl import render_dist
    return render_dist(f, fmt)
