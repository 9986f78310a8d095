"""One bulk point and two boundary points: the factorized Green's function,
its cross-ratio, and the general solution of the bulk ODE.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateError, DomainError
from .ode_core import Jet3, KappaParams
from .special_functions import hyp2f1_deriv

__all__ = [
    "BulkPoint",
    "bulk_green",
    "bulk_cross_ratio",
    "bulk_solution",
    "bulk_solution_jet",
    "boundary_two_point",
    "bulk_boundary_two_point",
    "mobius_image",
    "mobius_covariance_factor",
    "green_squared_factorization",
]


@dataclass(frozen=True)
class BulkPoint:
    x1: float
    x2: float
    z_re: float
    z_im: float

    def __post_init__(self):
        if not self.z_im > 0:
            raise DegenerateError(f"bulk point must lie in the upper half-plane, got Im z = {self.z_im}")
        if self.x1 == self.x2:
            raise DegenerateError("boundary points coincide")

    @property
    def z(self) -> complex:
        return complex(self.z_re, self.z_im)


def boundary_two_point(x1: float, x2: float, h: float) -> float:
    return abs(x2 - x1) ** (-h)


def bulk_boundary_two_point(x: float, z: complex, h: float, alpha: float) -> float:
    """Im(z)^((h - alpha)/2) |z - x|^(-h), one factor of the square of G."""
    return z.imag ** (0.5 * (h - alpha)) * abs(z - x) ** (-h)


def bulk_green(pt: BulkPoint, p: KappaParams) -> float:
    """G = |x2 - x1|^-h Im(z)^(h - alpha) |z - x1|^-h |z - x2|^-h, with C = 1."""
    h, a = p.h, p.alpha
    z = pt.z
    return (
        abs(pt.x2 - pt.x1) ** (-h)
        * z.imag ** (h - a)
        * abs(z - pt.x1) ** (-h)
        * abs(z - pt.x2) ** (-h)
    )


def bulk_cross_ratio(pt: BulkPoint) -> complex:
    """lambda = (x2 - x1)(conj z - z) / ((z - x1)(conj z - x2)); lies on |lambda - 1| = 1."""
    z = pt.z
    zb = z.conjugate()
    return (pt.x2 - pt.x1) * (zb - z) / ((z - pt.x1) * (zb - pt.x2))


def mobius_image(pt: BulkPoint, a: float, b: float, c: float, d: float) -> tuple[BulkPoint, tuple[float, float, float]]:
    """Image of ``pt`` under w -> (a w + b)/(c w + d), ad - bc > 0, and |phi'| at x1, x2, z."""
    det = a * d - b * c
    if not det > 0:
        raise DomainError("the map must preserve the upper half-plane (ad - bc > 0)")

    def phi(w):
        den = c * w + d
        if den == 0:
            raise DegenerateError("a marked point is sent to infinity")
        return (a * w + b) / den

    def dphi(w):
        return det / abs(c * w + d) ** 2

    z = phi(pt.z)
    image = BulkPoint(phi(pt.x1), phi(pt.x2), z.real, z.imag)
    return image, (dphi(pt.x1), dphi(pt.x2), dphi(pt.z))


def mobius_covariance_factor(pt: BulkPoint, p: KappaParams, a, b, c, d) -> float:
    """|phi'(x1)|^h |phi'(x2)|^h |phi'(z)|^alpha G(phi pt) / G(pt); equals 1 for a covariant G."""
    image, (d1, d2, dz) = mobius_image(pt, a, b, c, d)
    h, al = p.h, p.alpha
    return d1**h * d2**h * dz**al * bulk_green(image, p) / bulk_green(pt, p)


def green_squared_factorization(pt: BulkPoint, p: KappaParams) -> float:
    """G^2 / (G_b(x1, z) G_b(x2, z) G_bb(x1, x2)), which should be identically 1."""
    h, al = p.h, p.alpha
    z = pt.z
    # each bulk-boundary factor carries half of Im(z)^(2(h - alpha))
    f1 = bulk_boundary_two_point(pt.x1, z, h, al) ** 2
    f2 = bulk_boundary_two_point(pt.x2, z, h, al) ** 2
    f12 = boundary_two_point(pt.x1, pt.x2, h) ** 2
    return bulk_green(pt, p) ** 2 / (f1 * f2 * f12)


def _exponents(p: KappaParams):
    k = p.kappa
    e = (k - 8.0) / k
    return e, 0.5 * e


def _abs_pow_jet(x: Jet3, e: float) -> Jet3:
    """|x|^e as a jet, for x != 0."""
    if x.u == 0.0:
        raise DegenerateError("power of zero")
    if x.u > 0:
        return x**e
    return (-x) ** e


def bulk_solution_jet(lam: float, c1: float, c2: float, c3: float, p: KappaParams) -> Jet3:
    """Jet of the three-term general solution, lambda real in (0, 2) minus {1}.

    Powers of (1 - lambda) are taken as powers of |1 - lambda|.
    """
    if not (0.0 < lam < 2.0) or lam == 1.0:
        if lam == 1.0:
            raise DegenerateError("the solution basis is singular at lambda = 1")
        raise DomainError(f"lambda = {lam} outside (0, 2)")
    k = p.kappa
    e, e_half = _exponents(p)
    x = Jet3.variable(lam)
    y = 1.0 - x
    out = Jet3(0.0)
    if c1:
        out = out + (x ** (-e) * _abs_pow_jet(y, e_half)).scale(c1)
    if c2:
        a, b, c = 2.0 * e, 1.5 * e, (3.0 * k - 8.0) / (2.0 * k)
        f = y.compose(*(hyp2f1_deriv(a, b, c, y.u, n) for n in range(4)))
        out = out + (_abs_pow_jet(y, e) * f).scale(c2)
    if c3:
        a, b, c = e, 1.5 * e, (k + 8.0) / (2.0 * k)
        f = y.compose(*(hyp2f1_deriv(a, b, c, y.u, n) for n in range(4)))
        out = out + (_abs_pow_jet(y, e_half) * f).scale(c3)
    return out


def bulk_solution(lam: float, c1: float, c2: float, c3: float, p: KappaParams) -> float:
    return bulk_solution_jet(lam, c1, c2, c3, p).u
