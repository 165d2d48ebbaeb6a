"""Green functions of constant-coefficient operators and their constants.

Given P(d/dt) of degree k, the causal Green function G solves
P(d/dt) G = delta with support in [0, oo).  It is assembled from the
partial-fraction decomposition of 1/P over the roots of P, each residue
r/(x - lam)^j mapping to r * H t^(j-1) e^(lam t) / (j-1)!.

Root finding is exact for degree <= 2 with rational data (so the worked
examples stay exact end to end) and numeric otherwise: companion-matrix
eigenvalues, multiplicity clustering at a relative threshold, and a
multiplicity-aware Newton polish.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import IllConditioned
from .exactnum import CNum, CNumLike
from .genfunc import Dist, Kernel
from .scalars import GenScalar

CLUSTER_REL = 1e-7
RESIDUAL_REL = 1e-10

Root = Tuple[CNum, int]


@dataclass(frozen=True)
class PolyOp:
    """P(d/dt) as a polynomial; coefficients ascending (a_0 ... a_k)."""

    coeffs: Tuple[CNum, ...]
    roots_hint: Optional[Tuple[Root, ...]] = None

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("operator degree must be at least 1")
        if self.coeffs[-1].is_zero:
            raise ValueError("leading coefficient must be nonzero")

    @staticmethod
    def from_ascending(coeffs: Sequence[CNumLike],
                       roots_hint: Optional[Sequence[Root]] = None) -> "PolyOp":
        cs = tuple(CNum.from_value(c) for c in coeffs)
        while len(cs) > 1 and cs[-1].is_zero:
            cs = cs[:-1]
        hint = tuple(roots_hint) if roots_hint else None
        return PolyOp(cs, hint)

    @staticmethod
    def from_descending(coeffs: Sequence[CNumLike]) -> "PolyOp":
        return PolyOp.from_ascending(list(reversed(list(coeffs))))

    @staticmethod
    def from_roots(roots: Sequence[Tuple[CNumLike, int]],
                   leading: CNumLike = 1) -> "PolyOp":
        poly = [CNum.from_value(leading)]
        hint: List[Root] = []
        for lam, mult in roots:
            lam = CNum.from_value(lam)
            hint.append((lam, mult))
            for _ in range(mult):
                poly = _poly_mul(poly, [-lam, CNum.make(1)])
        return PolyOp(tuple(poly), tuple(hint))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> CNum:
        return self.coeffs[-1]

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.coeffs)

    @property
    def is_real(self) -> bool:
        return all(c.im == 0 for c in self.coeffs)

    def __call__(self, z: CNumLike) -> CNum:
        z = CNum.from_value(z)
        out = CNum.make(0)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def norm(self) -> float:
        return max(abs(c) for c in self.coeffs)


def _poly_mul(a: List[CNum], b: List[CNum]) -> List[CNum]:
    out = [CNum.make(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def _poly_deriv_coeffs(coeffs: Sequence[CNum]) -> List[CNum]:
    return [CNum.make(i) * coeffs[i] for i in range(1, len(coeffs))]


def _poly_eval(coeffs: Sequence[CNum], z: CNum) -> CNum:
    out = CNum.make(0)
    for c in reversed(coeffs):
        out = out * z + c
    return out


def apply_operator(op: PolyOp, y: Dist) -> Dist:
    """P(d/dt) y as a Dist."""
    out = Dist()
    deriv = y
    for j, a_j in enumerate(op.coeffs):
        if j > 0:
            deriv = deriv.differentiate()
        if not a_j.is_zero:
            out = out + deriv * GenScalar.from_value(a_j)
    return out


# -- root finding -----------------------------------------------------------

def find_roots(op: PolyOp) -> List[Root]:
    """Roots with multiplicities, summing to the degree.

    Exact for degree <= 2 over rational data with an exactly representable
    discriminant square root; otherwise numeric with clustering and polish.
    Raises IllConditioned when clustering is ambiguous or residuals fail.
    """
    if op.roots_hint is not None:
        roots = list(op.roots_hint)
    elif op.degree == 1:
        roots = [(-op.coeffs[0] / op.coeffs[1], 1)]
    elif op.degree == 2:
        roots = _quadratic_roots(op)
    else:
        roots = _numeric_roots(op)
    total = sum(m for _, m in roots)
    if total != op.degree:
        raise IllConditioned(
            f"root multiplicities sum to {total}, expected {op.degree}")
    _check_residuals(op, roots)
    roots.sort(key=lambda r: (float(r[0].re), float(r[0].im)))
    return roots


def _quadratic_roots(op: PolyOp) -> List[Root]:
    a0, a1, a2 = op.coeffs
    disc = a1 * a1 - CNum.make(4) * a2 * a0
    if op.is_exact:
        if disc.is_zero:
            return [(-a1 / (CNum.make(2) * a2), 2)]
        sq = disc.sqrt_exact()
        if sq is not None:
            two_a = CNum.make(2) * a2
            return [((-a1 + sq) / two_a, 1), ((-a1 - sq) / two_a, 1)]
    sq_f = cmath.sqrt(complex(disc))
    two_a = complex(a2) * 2.0
    z1 = (-complex(a1) + sq_f) / two_a
    z2 = (-complex(a1) - sq_f) / two_a
    return _postprocess_numeric(op, [z1, z2])


def _numeric_roots(op: PolyOp) -> List[Root]:
    desc = [complex(c) for c in reversed(op.coeffs)]
    raw = np.roots(np.array(desc, dtype=complex))
    return _postprocess_numeric(op, list(raw))


def _postprocess_numeric(op: PolyOp, raw: List[complex]) -> List[Root]:
    scale = max(1.0, max(abs(z) for z in raw))
    thr = CLUSTER_REL * scale
    clusters = _cluster(raw, thr)
    polished = []
    for members in clusters:
        mult = len(members)
        z = sum(members) / mult
        z = _newton_polish(op, z, mult)
        polished.append([z, mult])
    if op.is_real:
        polished = _conjugate_fix(polished, scale)
    return [(CNum.from_value(z), m) for z, m in polished]


def _cluster(points: List[complex], thr: float) -> List[List[complex]]:
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    gaps = []
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(points[i] - points[j])
            gaps.append(d)
            if d < thr:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(points[i])
    # ambiguity: an inter-cluster gap in the same decade as the threshold
    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j):
                d = abs(points[i] - points[j])
                if thr <= d < 10.0 * thr:
                    raise IllConditioned(
                        f"root gap {d:g} ambiguous at clustering threshold {thr:g}")
    return list(groups.values())


def _newton_polish(op: PolyOp, z: complex, mult: int, iters: int = 8) -> complex:
    """Newton on P^(mult-1), which has a simple root at a mult-fold root."""
    coeffs = list(op.coeffs)
    for _ in range(mult - 1):
        coeffs = _poly_deriv_coeffs(coeffs)
    dcoeffs = _poly_deriv_coeffs(coeffs)
    for _ in range(iters):
        pv = complex(_poly_eval(coeffs, CNum.from_value(z)))
        dv = complex(_poly_eval(dcoeffs, CNum.from_value(z)))
        if dv == 0:
            break
        step = pv / dv
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z


def _conjugate_fix(polished: List[list], scale: float) -> List[list]:
    """Snap near-real roots and enforce exact conjugate symmetry."""
    out = []
    pending = []
    for z, m in polished:
        if abs(z.imag) <= 1e-9 * max(1.0, abs(z)):
            out.append([complex(z.real, 0.0), m])
        else:
            pending.append([z, m])
    used = [False] * len(pending)
    for i, (z, m) in enumerate(pending):
        if used[i]:
            continue
        best, best_d = None, None
        for j in range(i + 1, len(pending)):
            if used[j] or pending[j][1] != m:
                continue
            d = abs(pending[j][0] - z.conjugate())
            if best_d is None or d < best_d:
                best, best_d = j, d
        if best is None or best_d > 1e-6 * scale:
            raise IllConditioned("could not pair complex roots conjugately")
        used[i] = used[best] = True
        w = (z + pending[best][0].conjugate()) / 2.0
        if w.imag < 0:
            w = w.conjugate()
        out.append([w, m])
        out.append([w.conjugate(), m])
    return out


def _check_residuals(op: PolyOp, roots: List[Root]) -> None:
    bound = RESIDUAL_REL * op.norm()
    for lam, mult in roots:
        scale = max(1.0, abs(lam)) ** op.degree
        if abs(op(lam)) > bound * scale:
            raise IllConditioned(
                f"root residual |P({complex(lam):g})| = {abs(op(lam)):g} too large")


# -- Green data ------------------------------------------------------------------

@dataclass(frozen=True)
class GreenData:
    """Green function of an operator plus its associated constants.

    constants[n] is the point value of the n-th derivative of the Green
    function at the origin, n = 0 .. degree-1.
    """

    operator: PolyOp
    green: Dist
    constants: Tuple[GenScalar, ...]
    roots: Tuple[Root, ...]


def green_function(op: PolyOp) -> GreenData:
    roots = find_roots(op)
    green = _partial_fraction_green(op, roots)
    residual = apply_operator(op, green) - Dist.delta()
    if not residual.close_to(Dist.zero(), 1e-9):
        raise IllConditioned("Green-function residual check failed")
    constants = tuple(green.eval_derivs_at_zero(op.degree))
    return GreenData(op, green, constants, tuple(roots))


def _partial_fraction_green(op: PolyOp, roots: List[Root]) -> Dist:
    out = Dist()
    for lam, mult in roots:
        # deflate: Q = P / (x - lam)^mult via synthetic division
        q = list(op.coeffs)
        for _ in range(mult):
            q = _synthetic_divide(q, lam)
        # h = 1/Q; derivatives at lam via Leibniz on Q h = 1
        q_at = _taylor_derivs(q, lam, mult)
        h = [CNum.make(1) / q_at[0]]
        for r in range(1, mult):
            acc = CNum.make(0)
            for i in range(1, r + 1):
                acc = acc + CNum.make(comb(r, i)) * q_at[i] * h[r - i]
            h.append(-acc / q_at[0])
        for j in range(1, mult + 1):
            residue = h[mult - j] / CNum.make(factorial(mult - j))
            coeff = residue / CNum.make(factorial(j - 1))
            out = out + Dist.single(Kernel.cut(j - 1, lam), coeff)
    return out


def _synthetic_divide(coeffs: List[CNum], lam: CNum) -> List[CNum]:
    """Divide an ascending-coefficient polynomial by (x - lam) exactly."""
    n = len(coeffs) - 1
    out = [CNum.make(0)] * n
    carry = coeffs[n]
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = coeffs[i] + lam * carry
    return out


def _taylor_derivs(coeffs: List[CNum], lam: CNum, count: int) -> List[CNum]:
    """[Q(lam), Q'(lam), ..., Q^(count-1)(lam)]."""
    out = []
    cur = list(coeffs)
    for _ in range(count):
        out.append(_poly_eval(cur, lam))
        cur = _poly_deriv_coeffs(cur) or [CNum.make(0)]
    return out


def green_derivative(op: PolyOp, n: int) -> Dist:
    """n-th derivative of the Green function of op."""
    return green_function(op).green.differentiate(n)


def homogeneous_basis(op: PolyOp) -> List[Dist]:
    """k independent smooth solutions t^j e^(lam t) of P(d/dt) y = 0."""
    roots = find_roots(op)
    basis = [Dist.smooth_exp(lam, j) for lam, mult in roots for j in range(mult)]
    wronskian = _numeric_wronskian_at_zero(basis)
    if abs(wronskian) < 1e-12:
        raise IllConditioned("homogeneous basis Wronskian numerically zero")
    return basis


def _numeric_wronskian_at_zero(basis: List[Dist]) -> complex:
    k = len(basis)
    mat = np.zeros((k, k), dtype=complex)
    for j, y in enumerate(basis):
        for i, val in enumerate(y.eval_derivs_at_zero(k)):
            const = val.constant_value()
            mat[i, j] = complex(const) if const is not None else 0.0
    return complex(np.linalg.det(mat))
