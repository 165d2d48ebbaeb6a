"""The field of generalized scalars.

A :class:`GenScalar` is a formal sum of monomials over a small closed set
of atoms with known asymptotic behavior under the mollifier scale eps:

* ``s``            -- the canonical infinitesimal (support radius), value eps;
* ``lam``          -- the infinite constant |ln s|, value -ln(eps);
* ``delta^(2k)(0)``-- point values of even delta derivatives, infinite of
                      order eps^-(2k+1) (odd orders vanish by evenness);
* odd-part cut-kernel constants -- infinitesimal quadrature-backed atoms
  carrying the half-line integral of the odd component of a kernel H(t)f(t).

Point values of cut kernels split as ``f(0+)/2 + odd-part atom``: the even
component of f integrates against the (even, unit-mass, moment-free) test
net exactly to f(0+)/2, while the odd component survives as a genuine O(eps)
constant.  This is what makes identities like "the second associated
constant of d^2/dt^2 + w^2 equals exactly 1/2" hold symbolically.

Coefficients are exact complex rationals where inputs are rational; float
contamination degrades gracefully, with cancellation chopped at 1e-12
relative during sums.
"""

from __future__ import annotations

import cmath
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

from .errors import NotInvertibleHere
from .exactnum import CNum, CNumLike
from .mollifier import MollifierSpec, quad_complex, rho, rho_deriv

CHOP_REL = 1e-12

_KIND_S = "s"
_KIND_LOG = "log"
_KIND_DELTA = "delta_even"
_KIND_ODD = "odd_cut"

#: atom kinds that admit negative exponents (invertible monomial fragment)
_INVERTIBLE_KINDS = (_KIND_S, _KIND_LOG, _KIND_DELTA)


@dataclass(frozen=True)
class Atom:
    """One generator of the scalar algebra; compared and hashed by value."""

    kind: str
    k: int = 0                  # delta_even: ddelta^(2k)(0); odd_cut: power m
    lam: CNum = CNum.make(0)    # odd_cut only: canonical exponent rate

    def sort_key(self):
        rank = {_KIND_S: 0, _KIND_LOG: 1, _KIND_DELTA: 2, _KIND_ODD: 3}[self.kind]
        return (rank, self.k, float(self.lam.re), float(self.lam.im),
                str(self.lam.re), str(self.lam.im))

    def growth(self) -> Tuple[int, int, bool]:
        """(p, r, exact): magnitude behaves like eps^p * |ln eps|^r.

        For odd_cut atoms (p, r) is only an upper-size bound, flagged
        exact=False; the others are sharp.
        """
        if self.kind == _KIND_S:
            return (1, 0, True)
        if self.kind == _KIND_LOG:
            return (0, 1, True)
        if self.kind == _KIND_DELTA:
            return (-(2 * self.k + 1), 0, True)
        # odd part of u^m e^(lam u): ~ u^m sinh-like for even m, cosh-like odd
        m = self.k
        p = m if m % 2 == 1 else m + 1
        return (p, 0, False)

    def deviation_bound(self) -> Optional[Tuple[float, int]]:
        """Assertable |atom| <= C * s^p for small eps (odd_cut atoms only)."""
        if self.kind != _KIND_ODD:
            return None
        m = self.k
        if m == 0:
            return (0.55 * max(abs(self.lam), 1e-30), 1)
        p = m if m % 2 == 1 else m + 1
        return (0.6 * max(1.0, abs(self.lam)), p)

    def numeric(self, spec: MollifierSpec) -> complex:
        if self.kind == _KIND_S:
            return complex(spec.eps)
        if self.kind == _KIND_LOG:
            import math
            return complex(-math.log(spec.eps))
        if self.kind == _KIND_DELTA:
            n = 2 * self.k
            return complex(rho_deriv(spec.profile, n, 0.0) / spec.eps ** (n + 1))
        return _odd_cut_value(self, spec)


def odd_cut_atom(m: int, lam: CNum) -> Tuple[int, Optional[Atom]]:
    """Canonical atom for the odd-part constant of the kernel H t^m e^(lam t).

    The defining net is the half-line integral of the odd component of
    u^m e^(lam u) against phi_eps.  Since the odd component flips sign under
    lam -> -lam (up to the parity of m), atoms are interned with lam in a
    canonical half plane; returns (sign, atom), atom None when the odd part
    vanishes identically (even m with lam = 0).
    """
    if lam.is_zero:
        if m % 2 == 0:
            return 1, None
        return 1, Atom(_KIND_ODD, m, lam)
    positive = lam.re > 0 or (lam.re == 0 and lam.im > 0)
    if positive:
        return 1, Atom(_KIND_ODD, m, lam)
    # value(m, -c) = (-1)^(m+1) value(m, c)
    sign = 1 if m % 2 == 1 else -1
    return sign, Atom(_KIND_ODD, m, -lam)


_QUAD_CACHE: Dict[tuple, complex] = {}
_QUAD_LOCK = threading.Lock()


def _odd_cut_value(atom: Atom, spec: MollifierSpec) -> complex:
    key = (atom, spec.eps, spec.profile, spec.quad_tol)
    with _QUAD_LOCK:
        hit = _QUAD_CACHE.get(key)
    if hit is not None:
        return hit
    m, lam = atom.k, complex(atom.lam)
    eps = spec.eps
    sgn = (-1.0) ** m

    def integrand(v: float) -> complex:
        u = eps * v
        odd = (cmath.exp(lam * u) - sgn * cmath.exp(-lam * u)) / 2.0
        return u ** m * odd * rho(spec.profile, v)

    val = quad_complex(integrand, 0.0, 1.0, spec.quad_tol)
    with _QUAD_LOCK:
        _QUAD_CACHE[key] = val
    return val


# -- monomials ---------------------------------------------------------------

Mono = Tuple[Tuple[Atom, int], ...]

_EMPTY_MONO: Mono = ()


def _mono_mul(a: Mono, b: Mono) -> Mono:
    exps: Dict[Atom, int] = {}
    for atom, e in a:
        exps[atom] = exps.get(atom, 0) + e
    for atom, e in b:
        exps[atom] = exps.get(atom, 0) + e
    items = [(atom, e) for atom, e in exps.items() if e != 0]
    for atom, e in items:
        if e < 0 and atom.kind not in _INVERTIBLE_KINDS:
            raise NotInvertibleHere(
                f"negative power of non-invertible atom {atom.kind}")
    items.sort(key=lambda it: it[0].sort_key())
    return tuple(items)


def _mono_pow(a: Mono, n: int) -> Mono:
    return tuple((atom, e * n) for atom, e in a) if n != 0 else _EMPTY_MONO


def _mono_growth(mono: Mono) -> Tuple[int, int, bool]:
    p, r, exact = 0, 0, True
    for atom, e in mono:
        ap, ar, aexact = atom.growth()
        p += ap * e
        r += ar * e
        exact = exact and aexact
    return p, r, exact


def _size_key(p: int, r: int) -> Tuple[int, int]:
    """Total order on magnitudes eps^p |ln eps|^r; larger key = larger size."""
    return (-p, r)


# -- asymptotic classification ------------------------------------------------

@dataclass(frozen=True)
class AsymptoticClass:
    """Mutually exclusive size tags; Finite carries its standard part."""

    kind: str                       # zero|infinitesimal|finite|infinite|unknown
    standard_part: Optional[CNum] = None

    @staticmethod
    def zero():
        return AsymptoticClass("zero", CNum.make(0))

    @staticmethod
    def infinitesimal():
        return AsymptoticClass("infinitesimal", CNum.make(0))

    @staticmethod
    def finite(st: CNum):
        return AsymptoticClass("finite", st)

    @staticmethod
    def infinite():
        return AsymptoticClass("infinite")

    @staticmethod
    def unknown():
        return AsymptoticClass("unknown")

    def __str__(self):
        if self.kind == "finite":
            return f"finite({self.standard_part.re}+{self.standard_part.im}i)"
        return self.kind


# -- the scalar field ----------------------------------------------------------

def _merge_term(acc: Dict[Mono, CNum], mono: Mono, coeff: CNum) -> None:
    """Accumulate coeff onto acc[mono] with cancellation chopping."""
    old = acc.get(mono)
    if old is None:
        if not coeff.is_zero:
            acc[mono] = coeff
        return
    s = old + coeff
    if s.is_zero:
        del acc[mono]
        return
    if not (old.is_exact and coeff.is_exact):
        if abs(s) <= CHOP_REL * max(abs(old), abs(coeff)):
            del acc[mono]
            return
    acc[mono] = s


@dataclass(frozen=True)
class GenScalar:
    """Element of the generalized-scalar field, kept in unique normal form."""

    terms: Tuple[Tuple[Mono, CNum], ...] = ()

    # -- constructors -----------------------------------------------------

    @staticmethod
    def _from_map(acc: Dict[Mono, CNum]) -> "GenScalar":
        items = [(m, c) for m, c in acc.items() if not c.is_zero]
        items.sort(key=lambda it: tuple(a.sort_key() + (e,) for a, e in it[0]))
        return GenScalar(tuple(items))

    @staticmethod
    def from_value(x: Union[CNumLike, "GenScalar"]) -> "GenScalar":
        if isinstance(x, GenScalar):
            return x
        c = CNum.from_value(x)
        if c.is_zero:
            return GenScalar()
        return GenScalar(((_EMPTY_MONO, c),))

    @staticmethod
    def from_atom(atom: Atom, exp: int = 1, coeff: CNumLike = 1) -> "GenScalar":
        c = CNum.from_value(coeff)
        if c.is_zero or exp == 0:
            return GenScalar.from_value(c)
        return GenScalar(((((atom, exp),), c),))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "GenScalar":
        o = GenScalar.from_value(other)
        acc: Dict[Mono, CNum] = dict(self.terms)
        for mono, coeff in o.terms:
            _merge_term(acc, mono, coeff)
        return GenScalar._from_map(acc)

    __radd__ = __add__

    def __neg__(self) -> "GenScalar":
        return GenScalar(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other) -> "GenScalar":
        return self + (-GenScalar.from_value(other))

    def __rsub__(self, other) -> "GenScalar":
        return GenScalar.from_value(other) + (-self)

    def __mul__(self, other) -> "GenScalar":
        o = GenScalar.from_value(other)
        acc: Dict[Mono, CNum] = {}
        for m1, c1 in self.terms:
            for m2, c2 in o.terms:
                _merge_term(acc, _mono_mul(m1, m2), c1 * c2)
        return GenScalar._from_map(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GenScalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = GenScalar.from_value(1)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "GenScalar":
        """Inverse of a single-term monomial over the invertible atoms."""
        if len(self.terms) != 1:
            raise NotInvertibleHere("only single-term scalars are invertible here")
        mono, coeff = self.terms[0]
        for atom, _ in mono:
            if atom.kind not in _INVERTIBLE_KINDS:
                raise NotInvertibleHere(
                    "kernel-constant atoms are not invertible here")
        inv_mono = _mono_pow(mono, -1)
        return GenScalar(((inv_mono, CNum.make(1) / coeff),))

    def __truediv__(self, other) -> "GenScalar":
        return self * GenScalar.from_value(other).inverse()

    def conjugate(self) -> "GenScalar":
        out = GenScalar()
        for mono, coeff in self.terms:
            part = GenScalar.from_value(coeff.conjugate())
            for atom, e in mono:
                if atom.kind == _KIND_ODD:
                    sign, conj_atom = odd_cut_atom(atom.k, atom.lam.conjugate())
                    factor = GenScalar.from_atom(conj_atom, 1, sign)
                    part = part * factor ** e
                else:
                    part = part * GenScalar.from_atom(atom, e)
            out = out + part
        return out

    # -- structure queries --------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Optional[CNum]:
        """The CNum value if this scalar is a pure complex constant."""
        if not self.terms:
            return CNum.make(0)
        if len(self.terms) == 1 and self.terms[0][0] == _EMPTY_MONO:
            return self.terms[0][1]
        return None

    def atoms(self) -> Iterable[Atom]:
        for mono, _ in self.terms:
            for atom, _e in mono:
                yield atom

    def has_atom_kind(self, kind: str) -> bool:
        return any(a.kind == kind for a in self.atoms())

    def classify(self) -> AsymptoticClass:
        """Conservative size classification from atom growth orders."""
        if not self.terms:
            return AsymptoticClass.zero()
        keyed = []
        for mono, coeff in self.terms:
            p, r, exact = _mono_growth(mono)
            keyed.append((_size_key(p, r), mono, coeff, exact))
        finite_key = _size_key(0, 0)
        if all(k < finite_key for k, *_ in keyed):
            return AsymptoticClass.infinitesimal()
        top = max(k for k, *_ in keyed)
        leaders = [t for t in keyed if t[0] == top]
        if top == finite_key:
            if len(leaders) == 1 and leaders[0][1] == _EMPTY_MONO:
                return AsymptoticClass.finite(leaders[0][2])
            return AsymptoticClass.unknown()
        if len(leaders) == 1 and leaders[0][3]:
            return AsymptoticClass.infinite()
        return AsymptoticClass.unknown()

    # -- evaluation -----------------------------------------------------------

    def numeric(self, spec: MollifierSpec) -> complex:
        total = 0.0 + 0.0j
        for mono, coeff in self.terms:
            val = complex(coeff)
            for atom, e in mono:
                val *= atom.numeric(spec) ** e
            total += val
        return total

    def close_to(self, other, tol: float = 1e-12) -> bool:
        diff = self - GenScalar.from_value(other)
        scale = max([1.0] + [abs(c) for _, c in self.terms]
                    + [abs(c) for _, c in GenScalar.from_value(other).terms])
        return all(abs(c) <= tol * scale for _, c in diff.terms)

    def __repr__(self) -> str:
        from .dsl import render_scalar
        try:
            return f"GenScalar({render_scalar(self)})"
        except Exception:
            return f"GenScalar(terms={self.terms!r})"


# -- canonical atoms and spec-level operation names ---------------------------

S = GenScalar.from_atom(Atom(_KIND_S))
LAM = GenScalar.from_atom(Atom(_KIND_LOG))


def delta_point(n: int) -> GenScalar:
    """The generalized number delta^(n)(0): zero for odd n, infinite for even."""
    if n % 2 == 1:
        return GenScalar()
    return GenScalar.from_atom(Atom(_KIND_DELTA, n // 2))


def gs_from_complex(c: CNumLike) -> GenScalar:
    return GenScalar.from_value(c)


def gs_arith(lhs: GenScalar, op: str, rhs: GenScalar) -> GenScalar:
    if op == "+":
        return lhs + rhs
    if op == "-":
        return lhs - rhs
    if op == "*":
        return lhs * rhs
    raise ValueError(f"unsupported operation {op!r}")


def gs_invert(x: GenScalar) -> GenScalar:
    return x.inverse()


def classify(x: GenScalar) -> AsymptoticClass:
    return x.classify()


def numeric_eval_scalar(x: GenScalar, spec: MollifierSpec) -> complex:
    return x.numeric(spec)
