"""Steady-state solvers for impulsively forced constant-coefficient IVPs.

The problem is P(d/dt) y = f with all initial data zero at the origin,
where f lives in the half-line kernel span with generalized-scalar weights.
The unique solution is

    y = sum_n c_n y_n + G * f,

with y_n the smooth homogeneous basis, G the causal Green function and the
c_n produced by Cramer's rule on the initial-condition system.  The only
generalized column of each Wronskian is the one holding G * f, so every
determinant reduces to a cofactor expansion with complex minors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import SingularWronskian
from .exactnum import CNum, CNumLike
from .genfunc import Dist, Kernel, KIND_CUT, KIND_DELTA
from .green import PolyOp, apply_operator, green_function, homogeneous_basis
from .scalars import AsymptoticClass, GenScalar

JUMP_TOL = 1e-10


@dataclass(frozen=True)
class IVProblem:
    """Operator plus half-line forcing; zero initial data is implicit."""

    operator: PolyOp
    forcing: Dist

    def __post_init__(self):
        if not self.forcing.supported_on_halfline:
            raise ValueError("forcing must be supported on [0, oo)")

    @property
    def order(self) -> int:
        return self.operator.degree


@dataclass(frozen=True)
class Solution:
    """Solved steady-state problem with its Cramer data kept around."""

    problem: IVProblem
    dist: Dist
    coefficients: Tuple[GenScalar, ...]
    basis: Tuple[Dist, ...]
    particular: Dist

    @property
    def classifications(self) -> Tuple[AsymptoticClass, ...]:
        return tuple(c.classify() for c in self.coefficients)


def solve_first_order(a: CNumLike, b: CNumLike, forcing: Dist) -> Solution:
    """Solution of a y' + b y = f, y(0) = 0: (g*f) - (g*f)(0) e^(-b t / a)."""
    a = CNum.from_value(a)
    b = CNum.from_value(b)
    if a.is_zero:
        raise ValueError("leading coefficient a must be nonzero")
    problem = IVProblem(PolyOp.from_ascending([b, a]), forcing)
    gd = green_function(problem.operator)
    particular = gd.green.convolve(forcing)
    c1 = -particular.eval_at_zero()
    hom = Dist.smooth_exp(-b / a)
    dist = particular + hom * c1
    return Solution(problem, dist, (c1,), (hom,), particular)


def wronskian_at_zero(columns: Sequence[Dist]) -> GenScalar:
    """Wronskian determinant at the origin over generalized scalars.

    Entry (i, j) is the i-th derivative of column j evaluated at 0.  Columns
    that evaluate to plain complex numbers are handled exactly; at most a
    few generalized columns are supported (expansion is recursive).
    """
    k = len(columns)
    matrix = [col.eval_derivs_at_zero(k) for col in columns]  # [col][row]
    rows = [[matrix[j][i] for j in range(k)] for i in range(k)]
    return _det_genscalar(rows)


def _det_genscalar(rows: List[List[GenScalar]]) -> GenScalar:
    """Determinant with cofactor expansion along generalized columns."""
    k = len(rows)
    consts: List[List[Optional[CNum]]] = [
        [entry.constant_value() for entry in row] for row in rows]
    gen_cols = [j for j in range(k)
                if any(consts[i][j] is None for i in range(k))]
    if not gen_cols:
        return GenScalar.from_value(_det_cnum(consts))
    j = gen_cols[0]
    if len(gen_cols) == 1:
        total = GenScalar()
        for i in range(k):
            minor = [[consts[r][c] for c in range(k) if c != j]
                     for r in range(k) if r != i]
            sign = 1 if (i + j) % 2 == 0 else -1
            total = total + rows[i][j] * (CNum.make(sign) * _det_cnum(minor))
        return total
    # rare: more than one generalized column, expand recursively
    total = GenScalar()
    for i in range(k):
        sub = [[rows[r][c] for c in range(k) if c != j]
               for r in range(k) if r != i]
        sign = 1 if (i + j) % 2 == 0 else -1
        total = total + rows[i][j] * CNum.make(sign) * _det_genscalar(sub)
    return total


def _det_cnum(matrix: List[List[CNum]]) -> CNum:
    k = len(matrix)
    if k == 0:
        return CNum.make(1)
    if k == 1:
        return matrix[0][0]
    total = CNum.make(0)
    for i in range(k):
        if matrix[i][0].is_zero:
            continue
        minor = [row[1:] for r, row in enumerate(matrix) if r != i]
        sign = 1 if i % 2 == 0 else -1
        total = total + CNum.make(sign) * matrix[i][0] * _det_cnum(minor)
    return total


def solve_ivp(problem: IVProblem,
              basis: Optional[Sequence[Dist]] = None) -> Solution:
    """General steady-state solve by Green convolution plus Cramer's rule.

    A basis may be supplied (any ordering / scaling of the homogeneous
    solutions); by default it is derived from the operator roots.
    """
    op = problem.operator
    k = op.degree
    gd = green_function(op)
    particular = gd.green.convolve(problem.forcing)
    hom = list(basis) if basis is not None else homogeneous_basis(op)
    if len(hom) != k:
        raise ValueError(f"need {k} homogeneous solutions, got {len(hom)}")

    mat: List[List[CNum]] = [[CNum.make(0)] * k for _ in range(k)]
    for j, y in enumerate(hom):
        for i, val in enumerate(y.eval_derivs_at_zero(k)):
            const = val.constant_value()
            if const is None:
                raise ValueError("homogeneous columns must be classical")
            mat[i][j] = const
    denom = _det_cnum(mat)
    if abs(denom) < 1e-12:
        raise SingularWronskian(
            f"|W(0)| = {abs(denom):g} below threshold; basis is degenerate")

    rhs = [-v for v in particular.eval_derivs_at_zero(k)]
    coefficients: List[GenScalar] = []
    for n in range(k):
        num = GenScalar()
        for i in range(k):
            minor = [[mat[r][c] for c in range(k) if c != n]
                     for r in range(k) if r != i]
            sign = 1 if (i + n) % 2 == 0 else -1
            num = num + rhs[i] * (CNum.make(sign) * _det_cnum(minor))
        coefficients.append(num * (CNum.make(1) / denom))

    dist = particular
    for c_n, y_n in zip(coefficients, hom):
        dist = dist + y_n * c_n
    return Solution(problem, dist, tuple(coefficients), tuple(hom), particular)


def residual(problem: IVProblem, y: Dist) -> Dist:
    """P(d/dt) y - f in normal form; the zero Dist iff y solves the ODE."""
    return apply_operator(problem.operator, y) - problem.forcing


@dataclass(frozen=True)
class SolvabilityReport:
    """Diagnosis of the classical-distribution solvability test."""

    status: str                       # "yes" | "no" | "unknown"
    reason: str = ""
    offending_order: Optional[int] = None
    jump: Optional[complex] = None
    has_delta_terms: bool = False


def has_distributional_solution(problem: IVProblem) -> Tuple[bool, SolvabilityReport]:
    """Whether the IVP admits a solution in the classical distribution space.

    The criterion: the causal particular solution G * f must contain no
    delta terms and must have no jump at the origin in its derivatives of
    order < k, i.e. it must be a C^(k-1) function near 0.  Generalized
    (non-complex) forcing weights make the question ill-posed here and are
    reported as unknown.
    """
    for _, coeff in problem.forcing.terms:
        if coeff.constant_value() is None:
            return False, SolvabilityReport(
                "unknown", "forcing carries generalized coefficients")
    gd = green_function(problem.operator)
    u = gd.green.convolve(problem.forcing)
    deltas = [k for k, _ in u.terms if k.kind == KIND_DELTA]
    if deltas:
        return False, SolvabilityReport(
            "no", "particular solution contains delta terms",
            offending_order=0, has_delta_terms=True)
    w = u
    for j in range(problem.order):
        jump = CNum.make(0)
        scale = 1.0
        for kernel, coeff in w.terms:
            if kernel.kind == KIND_CUT and kernel.power == 0:
                c = coeff.constant_value()
                if c is None:
                    return False, SolvabilityReport(
                        "unknown", "generalized jump coefficient")
                jump = jump + c
                scale = max(scale, abs(c))
        if (jump.is_exact and not jump.is_zero) or abs(jump) > JUMP_TOL * scale:
            return False, SolvabilityReport(
                "no", f"derivative of order {j} jumps at the origin",
                offending_order=j, jump=complex(jump))
        w = w.differentiate()
    return True, SolvabilityReport("yes", "particular solution is C^(k-1) at 0")
