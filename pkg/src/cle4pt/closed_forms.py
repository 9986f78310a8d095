"""Explicit solutions of the boundary ODE at special kappa, the FK-Ising
ratio, the kappa = 8/3 Brownian formula, and the two-arc partition function.

Every formula is written against Jet3 so that residual checks use exact
derivatives.
"""

from __future__ import annotations

import enum
import functools
import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .connection import boundary_basis
from .errors import DomainError, UnsupportedError
from .ode_core import Jet3, KappaParams
from .special_functions import hyp2f1, hyp2f1_deriv, hyp3f2, hyp3f2_deriv, integrate

__all__ = [
    "SpecialKappa",
    "SOLUTIONS",
    "v_exact",
    "v_exact_jet",
    "g_fk",
    "g_fk_direct",
    "g_fk_series",
    "g_fk_jet",
    "a_fk",
    "r_fk",
    "r_fk_complement",
    "brownian_p",
    "f_partition",
    "z_function",
    "z_check",
]


class SpecialKappa(enum.Enum):
    K6 = Fraction(6)
    K16_3 = Fraction(16, 3)
    K24_5 = Fraction(24, 5)
    K8 = Fraction(8)
    K4 = Fraction(4)
    K8_3 = Fraction(8, 3)
    K2 = Fraction(2)

    @property
    def kappa(self) -> Fraction:
        return self.value

    @property
    def params(self) -> KappaParams:
        return KappaParams.of(self.value)


def _hyp2f1_jet(a, b, c, z: Jet3) -> Jet3:
    return z.compose(*(hyp2f1_deriv(a, b, c, z.u, k) for k in range(4)))


def _hyp3f2_jet(a1, a2, a3, b1, b2, z: Jet3) -> Jet3:
    return z.compose(*(hyp3f2_deriv(a1, a2, a3, b1, b2, z.u, k) for k in range(4)))


# --- kappa = 6 ----------------------------------------------------------------

F_S_MAX = 0.45


def _f_s(x: Jet3) -> Jet3:
    if x.u > F_S_MAX:
        raise DomainError(f"F_S is served on (0, {F_S_MAX}] only")
    z = 4.0 * x * (1.0 - x)
    core = _hyp3f2_jet(4 / 3, 1.5, 7 / 3, 8 / 3, 3.0, z)
    return (1.0 - x) ** 2 * x**2 * core


# --- kappa = 16/3 -------------------------------------------------------------

def _v0_16_3(x: Jet3) -> Jet3:
    return 1.0 - x + x * x


def g_fk_jet(x: Jet3) -> Jet3:
    """Jet of the FK-Ising density g at x <= 1/2 (hypergeometric branch)."""
    if not 0.0 < x.u <= 0.5:
        raise DomainError("direct g is evaluated on (0, 1/2]")
    f1 = _hyp2f1_jet(1.5, 3.5, 3.0, x)
    f2 = _hyp2f1_jet(2.5, 4.5, 4.0, x)
    y = 1.0 - x
    bracket = (2.0 - 4.0 * y) * f1 - 3.0 * y * x * f2
    den = 2.0 * (y + x * x) ** 2
    return -(x**1.5) * bracket * y**1.5 / den


def g_fk_direct(x: float) -> float:
    return g_fk_jet(Jet3.variable(x)).u


@functools.lru_cache(maxsize=1)
def _basis_16_3():
    return boundary_basis(KappaParams.of(Fraction(16, 3)))


def g_fk_series(x: float) -> float:
    """g from the Frobenius route: g = d/dx [(2/5) V_{5/2} / V_0]."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"g is defined on (0, 1), got {x}")
    v0, _, v52 = _basis_16_3().jets(x)
    return 0.4 * (v52 / v0).du


def g_fk(x: float) -> float:
    """FK-Ising density g(x) on (0, 1), with g(x) ~ x^(3/2) as x -> 0."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"g is defined on (0, 1), got {x}")
    if x <= 0.5:
        return g_fk_direct(x)
    return g_fk_series(x)


QUAD_TOL = 1e-12


@functools.lru_cache(maxsize=1)
def a_fk() -> float:
    """A_FK = 1 / int_0^1 g."""
    return 1.0 / integrate(g_fk, 0.0, 1.0, QUAD_TOL).value


def r_fk(lam: float, tol: float = 1e-10) -> float:
    """R_FK(lambda) = A_FK int_0^lambda g."""
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda = {lam} outside (0, 1)")
    if lam > 0.5:
        return 1.0 - r_fk_complement(1.0 - lam, tol)
    return a_fk() * integrate(g_fk, 0.0, lam, tol).value


def r_fk_complement(eps: float, tol: float = 1e-12) -> float:
    """1 - R_FK(1 - eps) = A_FK int_{1-eps}^1 g, computed without cancellation."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps = {eps} outside (0, 1)")
    return a_fk() * integrate(g_fk, 1.0 - eps, 1.0, tol).value


def _v52_16_3(x: Jet3) -> Jet3:
    if not 0.0 < x.u <= 0.5:
        raise DomainError("the quadrature form of V_{5/2} is served on (0, 1/2]")
    g = g_fk_jet(x)
    integral = Jet3(integrate(g_fk, 0.0, x.u, QUAD_TOL).value, g.u, g.du, g.d2u)
    return _v0_16_3(x) * integral


# --- kappa = 24/5 -------------------------------------------------------------

def _v0_24_5(x: Jet3) -> Jet3:
    return 1.0 - (4.0 / 3.0) * x + (4.0 / 3.0) * x * x


def _v23_24_5(x: Jet3) -> Jet3:
    return x ** (2.0 / 3.0) * (1.0 - x + 0.75 * x * x)


def _v3_24_5(x: Jet3) -> Jet3:
    return _v0_24_5(x) - (4.0 / 3.0) * _v23_24_5(1.0 - x)


# --- kappa = 8/3 --------------------------------------------------------------

def _u0_8_3(x: Jet3) -> Jet3:
    y = 1.0 - x
    return x * x * y * y * (1.0 + x * x + y * y)


def _bracket_8_3(x: Jet3) -> Jet3:
    xm1 = x - 1.0
    q = x * x - x + 1.0
    return (
        5.0 * x * x
        - 5.0 * x
        - 5.0 / (xm1 * xm1)
        - 5.0 / xm1
        - 24.0 * (1.0 - x).log()
        + 7.0 * (-x - 1.0) / q
        + 7.0
    )


def _u1_8_3(x: Jet3) -> Jet3:
    return _bracket_8_3(x) * _u0_8_3(x)


def brownian_p(lam: float) -> float:
    """Conjectured non-intersection probability of the two Brownian excursion pairs."""
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda = {lam} outside (0, 1)")
    x = Jet3(lam)
    q = lam * lam - lam + 1.0
    return -((1.0 - lam) ** 2) / (5.0 * lam * lam) * q * _bracket_8_3(x).u


# --- table ----------------------------------------------------------------------

def _reflected(f: Callable[[Jet3], Jet3]) -> Callable[[Jet3], Jet3]:
    return lambda x: f(1.0 - x)


SOLUTIONS: dict[SpecialKappa, dict[str, Callable[[Jet3], Jet3]]] = {
    SpecialKappa.K6: {"V2": _f_s},
    SpecialKappa.K16_3: {"V0": _v0_16_3, "V5/2": _v52_16_3},
    SpecialKappa.K24_5: {"V0": _v0_24_5, "V2/3": _v23_24_5, "V3": _v3_24_5},
    SpecialKappa.K8: {
        "const": lambda x: x * 0.0 + 1.0,
        "log1m": lambda x: -((1.0 - x).log()),
        "log": lambda x: -(x.log()),
    },
    SpecialKappa.K4: {
        "const": lambda x: x * 0.0 + 1.0,
        "cubic": lambda x: x - 1.5 * x * x + x * x * x,
        "quartic": lambda x: x * x * x * x,
    },
    SpecialKappa.K8_3: {"U0": _u0_8_3, "U1": _u1_8_3, "U2": _reflected(_u1_8_3)},
    SpecialKappa.K2: {
        "U0": lambda x: 6.0 * x * x - 6.0 * x + 1.0,
        "U1": lambda x: x**10 * (x * x - 6.0 * x + 6.0),
        "U2": _reflected(lambda x: x**10 * (x * x - 6.0 * x + 6.0)),
    },
}


def v_exact_jet(sk: SpecialKappa, which: str, lam: float) -> Jet3:
    try:
        f = SOLUTIONS[sk][which]
    except KeyError:
        raise UnsupportedError(f"no printed solution {which!r} at {sk.name}") from None
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda = {lam} outside (0, 1)")
    return f(Jet3.variable(lam))


def v_exact(sk: SpecialKappa, which: str, lam: float) -> float:
    """Value of the printed closed-form solution ``which`` at kappa ``sk``."""
    return v_exact_jet(sk, which, lam).u


# --- two-arc partition function ---------------------------------------------------

def _check_kappa(p: KappaParams):
    if not (4 < p.exact < 8):
        raise DomainError(f"partition function is set up for kappa in (4, 8), got {p.kappa}")


def f_partition(p: KappaParams, x: float) -> float:
    """f(x) = x^(2/k) (1-x)^(1-6/k) 2F1(4/k, 1-4/k; 8/k; x) / 2F1(...; 1)."""
    _check_kappa(p)
    if not 0.0 < x < 1.0:
        raise DomainError(f"x = {x} outside (0, 1)")
    k = p.kappa
    a, b, c = 4.0 / k, 1.0 - 4.0 / k, 8.0 / k
    norm = hyp2f1(a, b, c, 1.0)
    return x ** (2.0 / k) * (1.0 - x) ** (1.0 - 6.0 / k) * hyp2f1(a, b, c, x) / norm


def z_function(p: KappaParams, tau: float) -> float:
    """Z(tau) = f(1 - tau) + f(tau) / (-2 cos(4 pi / kappa))."""
    weight = 1.0 / (-2.0 * math.cos(4.0 * math.pi / p.kappa))
    return f_partition(p, 1.0 - tau) + weight * f_partition(p, tau)


ROUNDOFF_FLOOR = 1e-13


def z_check(p: KappaParams, tau_grid: Sequence[float]) -> float:
    """Least-squares log-log slope of |tau^(2b) Z(tau) - 1| over ``tau_grid``.

    Returns ``inf`` when the deviation is at rounding level on the whole grid
    (it then vanishes identically and no power law can be fitted).
    """
    taus = np.asarray(tau_grid, dtype=float)
    dev = np.array([abs(t ** (2.0 * p.b) * z_function(p, t) - 1.0) for t in taus])
    if np.all(dev <= ROUNDOFF_FLOOR):
        return math.inf
    keep = dev > 0
    slope, _ = np.polyfit(np.log(taus[keep]), np.log(dev[keep]), 1)
    return float(slope)
