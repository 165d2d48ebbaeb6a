"""Compactly supported mollifier profiles, their derivatives, and quadrature.

The regularization scale eps turns each generalized object into one concrete
representative: phi_eps(x) = rho(x/eps)/eps, where rho is an even C-infinity
bump supported on [-1, 1] with unit mass.  Derivatives of rho are computed
through the rational-prefactor recurrence

    rho^(n)(x) = p_n(x) / (1 - x^2)^(2n) * rho(x),

with integer-coefficient polynomials p_n, so odd derivatives vanish exactly
at 0 by parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from scipy.integrate import quad

from .errors import OrderTooHigh, QuadratureFailure

#: sharpness parameter c of each profile rho_c(x) ~ exp(-c / (1 - x^2))
PROFILES = {"bump": 1, "bump2": 2}

#: derivative orders above this are numerically unreliable (prefactor growth)
MAX_DERIV_ORDER = 12


# -- integer polynomial helpers (ascending coefficient lists) ---------------

def _padd(a: Sequence[int], b: Sequence[int]) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
            for i in range(n)]


def _pmul(a: Sequence[int], b: Sequence[int]) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _pdiff(a: Sequence[int]) -> list:
    return [i * a[i] for i in range(1, len(a))] or [0]


def _peval(a: Sequence[int], x: float) -> float:
    out = 0.0
    for c in reversed(a):
        out = out * x + c
    return out


@lru_cache(maxsize=None)
def _prefactor_poly(c: int, n: int) -> tuple:
    """p_n for rho_c, with rho_c^(n) = p_n/(1-x^2)^(2n) * rho_c."""
    if n == 0:
        return (1,)
    p = list(_prefactor_poly(c, n - 1))
    u = [1, 0, -1]  # 1 - x^2
    term1 = _pmul(_pmul(u, u), _pdiff(p))
    term2 = _pmul([0, 4 * (n - 1)], _pmul(u, p))
    term3 = _pmul([0, -2 * c], p)
    return tuple(_padd(_padd(term1, term2), term3))


@lru_cache(maxsize=None)
def _normalizer(c: int) -> float:
    """N_c with integral of N_c * exp(-c/(1-x^2)) over [-1, 1] equal to 1."""
    val, err = quad(lambda x: math.exp(-c / (1.0 - x * x)), -1.0, 1.0,
                    epsabs=1e-14, epsrel=1e-13, limit=200)
    if err > 1e-11:
        raise QuadratureFailure(f"bump normalizer quadrature error {err:g}")
    return 1.0 / val


def _profile_c(profile: str) -> int:
    try:
        return PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown mollifier profile {profile!r}") from None


def rho(profile: str, x: float) -> float:
    """The normalized bump profile at x (zero outside (-1, 1))."""
    c = _profile_c(profile)
    if abs(x) >= 1.0:
        return 0.0
    return _normalizer(c) * math.exp(-c / (1.0 - x * x))


def rho_deriv(profile: str, n: int, x: float) -> float:
    """n-th derivative of the profile at x; n is capped at MAX_DERIV_ORDER."""
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n > MAX_DERIV_ORDER:
        raise OrderTooHigh(f"mollifier derivative order {n} > {MAX_DERIV_ORDER}")
    if n == 0:
        return rho(profile, x)
    c = _profile_c(profile)
    if abs(x) >= 1.0:
        return 0.0
    u = 1.0 - x * x
    p = _peval(_prefactor_poly(c, n), x)
    return p / u ** (2 * n) * rho(profile, x)


@dataclass(frozen=True)
class MollifierSpec:
    """One concrete regularization: profile, scale, quadrature tolerance."""

    eps: float
    profile: str = "bump"
    quad_tol: float = 1e-10

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("mollifier scale eps must be positive")
        _profile_c(self.profile)
        if self.quad_tol <= 0:
            raise ValueError("quadrature tolerance must be positive")

    def phi(self, x: float) -> float:
        """phi_eps(x) = rho(x/eps)/eps."""
        return rho(self.profile, x / self.eps) / self.eps

    def phi_deriv(self, n: int, x: float) -> float:
        return rho_deriv(self.profile, n, x / self.eps) / self.eps ** (n + 1)


def quad_complex(fn: Callable[[float], complex], a: float, b: float,
                 tol: float, points: Optional[Sequence[float]] = None) -> complex:
    """Adaptive quadrature of a complex integrand over a finite interval.

    Subdivision points (kernel discontinuities) may be supplied; failures to
    reach the tolerance raise QuadratureFailure rather than warn.
    """
    if a == b:
        return 0.0 + 0.0j
    pts = None
    if points:
        pts = sorted(p for p in points if min(a, b) < p < max(a, b)) or None

    def run(part):
        res = quad(part, a, b, epsabs=tol * 0.1, epsrel=tol,
                   limit=200, points=pts, full_output=1)
        return res[0], res[1]

    re_val, re_err = run(lambda x: fn(x).real)
    im_val, im_err = run(lambda x: fn(x).imag)
    total = complex(re_val, im_val)
    budget = tol * max(1.0, abs(total)) * 50.0
    if re_err + im_err > budget:
        raise QuadratureFailure(
            f"quadrature error {re_err + im_err:g} exceeds budget {budget:g}")
    return total
