"""Parameters, the boundary and bulk third-order ODEs, and jets.

Coefficient polynomials are built in exact rational arithmetic (Fraction)
and then stored as float arrays in ascending powers of lambda, indexed by
derivative order: ``coeffs[k]`` multiplies the k-th derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateError, DomainError, OrderError

__all__ = [
    "KappaParams",
    "OdeSpec",
    "Jet3",
    "make_boundary_ode",
    "make_bulk_ode",
    "residual",
    "normalized_residual",
    "reflect_spec",
    "fusion_pde_residual",
    "cross_ratio",
    "green_prefactor",
]

# kappa values where the Frobenius exponents at 0 resonate
RESONANT_KAPPAS = (Fraction(6), Fraction(16, 3), Fraction(24, 5))
SNAP_TOL = 1e-12
TERM_FLOOR = 1e-6


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


@dataclass(frozen=True)
class KappaParams:
    """kappa together with h = 8/kappa - 1, b = (6 - kappa)/(2 kappa) and
    alpha = (3 kappa - 8)(8 - kappa)/(32 kappa).

    Build with :meth:`of`, which snaps kappa onto the resonant rationals
    6, 16/3 and 24/5 when it is within 1e-12 of them.
    """

    exact: Fraction

    def __post_init__(self):
        if not (0 < self.exact <= 8):
            raise DomainError(f"kappa must lie in (0, 8], got {float(self.exact)}")

    @classmethod
    def of(cls, kappa) -> "KappaParams":
        k = _as_fraction(kappa)
        for r in RESONANT_KAPPAS:
            if abs(float(k) - float(r)) <= SNAP_TOL:
                k = r
                break
        return cls(k)

    @property
    def kappa(self) -> float:
        return float(self.exact)

    @property
    def h_exact(self) -> Fraction:
        return 8 / self.exact - 1

    @property
    def b_exact(self) -> Fraction:
        return (6 - self.exact) / (2 * self.exact)

    @property
    def alpha_exact(self) -> Fraction:
        k = self.exact
        return (3 * k - 8) * (8 - k) / (32 * k)

    @property
    def h(self) -> float:
        return float(self.h_exact)

    @property
    def b(self) -> float:
        return float(self.b_exact)

    @property
    def alpha(self) -> float:
        return float(self.alpha_exact)

    @property
    def conjectural(self) -> bool:
        """True outside (4, 8), where the boundary ODE is only expected to hold."""
        return not (4 < self.exact < 8)


# ---------------------------------------------------------------------------
# exact polynomial helpers (ascending coefficient lists)

def _pmul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _padd(*ps: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(p) for p in ps)
    out = [Fraction(0)] * n
    for p in ps:
        for i, a in enumerate(p):
            out[i] += a
    return out


def _pscale(c, p: Sequence[Fraction]) -> list[Fraction]:
    return [c * a for a in p]


def _ptrim(p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _pcompose_reflect(p: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients of p(1 - t) in powers of t."""
    out = [Fraction(0)]
    one_minus_t = [Fraction(1), Fraction(-1)]
    power = [Fraction(1)]
    for a in p:
        out = _padd(out, _pscale(a, power))
        power = _pmul(power, one_minus_t)
    return out


LAM = (Fraction(0), Fraction(1))
ONE_MINUS_LAM = (Fraction(1), Fraction(-1))


@dataclass(frozen=True, eq=False)
class OdeSpec:
    """A third-order linear ODE sum_k p_k(lambda) U^(k) = 0.

    ``exact[k]`` holds the ascending rational coefficients of p_k and
    ``coeffs[k]`` the same as a float array.
    """

    exact: tuple[tuple[Fraction, ...], ...]
    kappa: float
    kind: str = "boundary"

    degree = 3

    @property
    def coeffs(self) -> tuple[np.ndarray, ...]:
        return tuple(np.array([float(c) for c in p]) for p in self.exact)

    def eval_coeffs(self, lam: float) -> tuple[float, float, float, float]:
        out = []
        for p in self.exact:
            acc = 0.0
            for c in reversed(p):
                acc = acc * lam + float(c)
            out.append(acc)
        return tuple(out)


def make_boundary_ode(p: KappaParams) -> OdeSpec:
    """The boundary four-point ODE at kappa."""
    k = p.exact
    p3 = _pscale(k**3 / 2, _pmul(_pmul(LAM, LAM), _pmul(ONE_MINUS_LAM, ONE_MINUS_LAM)))
    p2 = _pscale(
        k**2 * (3 * k - 16),
        _pmul(_pmul(LAM, ONE_MINUS_LAM), (Fraction(1), Fraction(-2))),
    )
    quad = 18 * k**2 - 212 * k + 608
    # lambda(lambda - 1) = -lambda + lambda^2
    p1 = _pscale(k, _padd([3 * (k - 4) * (k - 8)], _pscale(quad, [0, -1, 1])))
    p0 = _pscale(6 * (k - 4) * (k - 8) ** 2, [Fraction(-1), Fraction(2)])
    return OdeSpec(tuple(_ptrim(q) for q in (p0, p1, p2, p3)), float(k), "boundary")


def make_bulk_ode(p: KappaParams, alpha_override=None) -> OdeSpec:
    """The one-bulk/two-boundary ODE for Delta(lambda), lambda viewed as real.

    ``alpha_override`` replaces the interior weight (default ``p.alpha``).
    """
    if not (4 < p.exact < 8):
        raise DomainError(f"bulk ODE is set up for kappa in (4, 8), got {p.kappa}")
    k = p.exact
    a = p.alpha_exact if alpha_override is None else _as_fraction(alpha_override)
    oml2 = _pmul(ONE_MINUS_LAM, ONE_MINUS_LAM)
    oml3 = _pmul(oml2, ONE_MINUS_LAM)
    p3 = _pscale(k**2, _pmul(_pmul(LAM, LAM), oml3))
    lin = [-(3 * k - 16), 3 * k - 8]
    p2 = _pscale(-2 * k, _pmul(_pmul(LAM, oml2), lin))
    quad = [6 * (k - 4) * (k - 8), -4 * (k - 6) * (3 * k - 8), -8 * a * k + 6 * k**2 - 40 * k + 64]
    p1 = _pmul(ONE_MINUS_LAM, quad)
    p0 = _pscale(8 * a * (8 - k), [Fraction(0), Fraction(2), Fraction(-1)])
    return OdeSpec(tuple(_ptrim(q) for q in (p0, p1, p2, p3)), float(k), "bulk")


def reflect_spec(spec: OdeSpec) -> OdeSpec:
    """The ODE satisfied by U(1 - t) as a function of t."""
    out = []
    for order, poly in enumerate(spec.exact):
        q = _pcompose_reflect(poly)
        if order % 2:
            q = [-c for c in q]
        out.append(_ptrim(q))
    return OdeSpec(tuple(out), spec.kappa, spec.kind)


# ---------------------------------------------------------------------------
# jets

@dataclass(frozen=True)
class Jet3:
    """A value with its first three derivatives at one point."""

    u: float
    du: float = 0.0
    d2u: float = 0.0
    d3u: float = 0.0

    @classmethod
    def variable(cls, x: float) -> "Jet3":
        return cls(float(x), 1.0, 0.0, 0.0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u, self.du, self.d2u, self.d3u)

    def compose(self, f0: float, f1: float, f2: float, f3: float) -> "Jet3":
        """Jet of phi(self) given phi and its derivatives at self.u."""
        g1, g2, g3 = self.du, self.d2u, self.d3u
        return Jet3(
            f0,
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1**3 + 3.0 * f2 * g1 * g2 + f1 * g3,
        )

    def reflected(self) -> "Jet3":
        """Jet of t -> U(1 - t), given the jet of U at 1 - t."""
        return Jet3(self.u, -self.du, self.d2u, -self.d3u)

    def scale(self, c: float) -> "Jet3":
        return Jet3(c * self.u, c * self.du, c * self.d2u, c * self.d3u)

    def __add__(self, other):
        if isinstance(other, Jet3):
            return Jet3(self.u + other.u, self.du + other.du,
                        self.d2u + other.d2u, self.d3u + other.d3u)
        return Jet3(self.u + other, self.du, self.d2u, self.d3u)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            return self.scale(float(other))
        f, g = self, other
        return Jet3(
            f.u * g.u,
            f.du * g.u + f.u * g.du,
            f.d2u * g.u + 2.0 * f.du * g.du + f.u * g.d2u,
            f.d3u * g.u + 3.0 * f.d2u * g.du + 3.0 * f.du * g.d2u + f.u * g.d3u,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet3":
        x = self.u
        if x == 0.0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        return self.compose(1.0 / x, -1.0 / x**2, 2.0 / x**3, -6.0 / x**4)

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return self * other.reciprocal()
        return self.scale(1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        p = float(p)
        x = self.u
        if x <= 0.0 and p != math.floor(p):
            raise DomainError("fractional power of a nonpositive jet")
        return self.compose(
            x**p,
            p * x ** (p - 1.0),
            p * (p - 1.0) * x ** (p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x ** (p - 3.0),
        )

    def log(self) -> "Jet3":
        x = self.u
        if x <= 0.0:
            raise DomainError("log of a nonpositive jet")
        return self.compose(math.log(x), 1.0 / x, -1.0 / x**2, 2.0 / x**3)

    def exp(self) -> "Jet3":
        e = math.exp(self.u)
        return self.compose(e, e, e, e)


def _terms(spec: OdeSpec, jet: Jet3, lam: float) -> tuple[float, ...]:
    p = spec.eval_coeffs(lam)
    j = jet.as_tuple()
    return tuple(p[k] * j[k] for k in range(4))


def residual(spec: OdeSpec, jet: Jet3, lam: float) -> float:
    """p3 U''' + p2 U'' + p1 U' + p0 U at lambda."""
    t = _terms(spec, jet, lam)
    return t[3] + t[2] + t[1] + t[0]


def normalized_residual(spec: OdeSpec, jet: Jet3, lam: float) -> float:
    """Residual divided by its largest term max_k |p_k U^(k)|.

    The terms can all vanish together (for example at lambda = 1/2 for a
    symmetric solution); the scale is then floored at TERM_FLOOR times
    max_k |p_k| * max_k |U^(k)| so that rounding noise is not amplified.
    """
    p = spec.eval_coeffs(lam)
    j = jet.as_tuple()
    t = [p[k] * j[k] for k in range(4)]
    floor = TERM_FLOOR * max(abs(c) for c in p) * max(abs(v) for v in j)
    scale = max(max(abs(v) for v in t), floor)
    if scale == 0.0:
        return 0.0
    return (t[3] + t[2] + t[1] + t[0]) / scale


# ---------------------------------------------------------------------------
# geometry

def _cyclic_ok(xs: Sequence[float]) -> bool:
    finite = [x for x in xs if not math.isinf(x)]
    if len(set(xs)) != len(xs):
        return False
    if any(math.isinf(x) and x < 0 for x in xs) or len(finite) < len(xs) - 1:
        return False
    # rotate so the sequence starts right after infinity (if present)
    seq = list(xs)
    if len(finite) < len(xs):
        i = next(i for i, x in enumerate(xs) if math.isinf(x))
        seq = seq[i + 1:] + seq[:i]
        return all(a < b for a, b in zip(seq, seq[1:]))
    descents = sum(1 for a, b in zip(seq, seq[1:]) if a > b)
    if descents == 0:
        return True
    return descents == 1 and seq[-1] < seq[0]


def cross_ratio(x1: float, x2: float, x3: float, x4: float) -> float:
    """lambda = (x2 - x1)(x4 - x3) / ((x4 - x2)(x3 - x1)) for points in
    counterclockwise order on the boundary of the upper half-plane.

    One point may be ``math.inf``.
    """
    xs = (float(x1), float(x2), float(x3), float(x4))
    if not _cyclic_ok(xs):
        raise OrderError(f"points {xs} are not in counterclockwise order")
    x1, x2, x3, x4 = xs
    if math.isinf(x4):
        return (x2 - x1) / (x3 - x1)
    if math.isinf(x1):
        return (x4 - x3) / (x4 - x2)
    if math.isinf(x2):
        return (x4 - x3) / (x1 - x3)
    if math.isinf(x3):
        return (x2 - x1) / (x2 - x4)
    return (x2 - x1) * (x4 - x3) / ((x4 - x2) * (x3 - x1))


def green_prefactor(x1: float, x2: float, x3: float, x4: float, h: float) -> float:
    """Covariance prefactor multiplying U(lambda) in the four-point Green's function."""
    xs = (float(x1), float(x2), float(x3), float(x4))
    if any(math.isinf(x) for x in xs):
        raise DomainError("green_prefactor needs four finite points")
    if not _cyclic_ok(xs):
        raise OrderError(f"points {xs} are not in counterclockwise order")
    x1, x2, x3, x4 = xs
    q = (x4 - x2) * (x3 - x1) / ((x2 - x1) * (x4 - x3) * (x3 - x2) * (x4 - x1))
    return abs(q) ** (2.0 * h)


# ---------------------------------------------------------------------------
# fusion PDE check

_D1 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))
_D3 = ((-3, 1.0 / 8), (-2, -1.0), (-1, 13.0 / 8), (1, -13.0 / 8), (2, 1.0), (3, -1.0 / 8))

FUSION_REL_STEP = 1e-2


def _value(U: Callable, lam: float) -> float:
    v = U(lam)
    return v.u if isinstance(v, Jet3) else float(v)


def fusion_g0(U: Callable, p: KappaParams, u: float, x1: float, x2: float, x3: float) -> float:
    """g0 = (1 - lambda)^(-2h) U(lambda) / ((x1 - u)(x3 - x2))^(2h)."""
    lam = (x1 - u) * (x3 - x2) / ((x3 - x1) * (x2 - u))
    h = p.h
    return (1.0 - lam) ** (-2.0 * h) * _value(U, lam) / ((x1 - u) * (x3 - x2)) ** (2.0 * h)


def fusion_pde_residual(
    U: Callable,
    p: KappaParams,
    u: float,
    x1: float,
    x2: float,
    x3: float,
    step: float | None = None,
) -> float:
    """Normalized residual of the fused third-order PDE for g0 built from U.

    All partial derivatives are taken by central finite differences with
    fourth-order stencils (7 points for the third derivative).  The default
    step is 1e-2 times the smallest gap between the marked points.
    """
    if not (u < x1 < x2 < x3):
        raise OrderError("fusion check needs u < x1 < x2 < x3")
    lam = (x1 - u) * (x3 - x2) / ((x3 - x1) * (x2 - u))
    if not (0.05 < lam < 0.95):
        raise DomainError(f"cross-ratio {lam} outside (0.05, 0.95)")
    gap = min(x1 - u, x2 - x1, x3 - x2)
    if step is None:
        step = FUSION_REL_STEP * gap
    if gap < 100.0 * step * 0.999999:
        raise DegenerateError("marked points closer than 100 stencil steps")
    kappa, h = p.kappa, p.h
    base = [u, x1, x2, x3]

    def g(shift: dict[int, float]) -> float:
        pts = list(base)
        for i, d in shift.items():
            pts[i] += d
        return fusion_g0(U, p, *pts)

    def d1(i: int, extra: dict[int, float] | None = None) -> float:
        acc = 0.0
        for m, w in _D1:
            sh = dict(extra or {})
            sh[i] = sh.get(i, 0.0) + m * step
            acc += w * g(sh)
        return acc / step

    g0 = g({})
    gu = d1(0)
    guuu = sum(w * g({0: m * step}) for m, w in _D3) / step**3
    terms = [kappa / 4.0 * guuu]
    coef = 0.5 * (1.0 - 8.0 / kappa)
    for i in (1, 2, 3):
        xi = base[i]
        gx = d1(i)
        gux = sum(w * d1(i, {0: m * step}) for m, w in _D1) / step
        terms.append(coef * 4.0 * gx / (xi - u) ** 2)
        terms.append(-coef * 8.0 * h * g0 / (xi - u) ** 3)
        terms.append(4.0 * gux / (xi - u))
        terms.append(-4.0 * h * gu / (xi - u) ** 2)
    scale = max(abs(t) for t in terms)
    if scale == 0.0:
        return 0.0
    return math.fsum(terms) / scale
