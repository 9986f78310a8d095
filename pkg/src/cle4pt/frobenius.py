"""Frobenius series at the regular singular points 0 and 1.

A solution about ``pt`` is stored as

    U = sum_n a[n] t^(rho+n)  +  |log t| * sum_n l[n] t^(rho+n),    t = |lambda - pt|,

so ``l`` multiplies -log t.  The log part is present only when another
indicial root exceeds rho by a positive integer M; then l[n] = 0 for n < M
and a[M] is a free parameter (``resonant_coeff``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, IrregularPointError, TrustRegionError, UnsupportedError
from .ode_core import Jet3, OdeSpec, reflect_spec

__all__ = [
    "FrobeniusSolution",
    "indicial_roots",
    "expand",
    "eval_jet",
    "reflect",
    "DEFAULT_ORDER",
    "TRUST_RADIUS",
]

DEFAULT_ORDER = 200
TRUST_RADIUS = 0.6
RESONANCE_TOL = 1e-9
# numerator of the log coefficient below this (relative) counts as zero,
# i.e. the resonance is only apparent
APPARENT_TOL = 1e-11


def _ff(mu: float, k: int) -> float:
    """Falling factorial mu (mu - 1) ... (mu - k + 1)."""
    out = 1.0
    for j in range(k):
        out *= mu - j
    return out


def _dff(mu: float, k: int) -> float:
    """d/dmu of the falling factorial."""
    total = 0.0
    for j in range(k):
        prod = 1.0
        for i in range(k):
            if i != j:
                prod *= mu - i
        total += prod
    return total


class _Recurrence:
    """The ODE written as sum_s P_s(mu) acting on t^mu -> t^(mu + d + s)."""

    def __init__(self, spec: OdeSpec):
        coeffs = [[float(c) for c in p] for p in spec.exact]
        shifts = [j - k for k, p in enumerate(coeffs) for j, c in enumerate(p) if c != 0.0]
        if not shifts:
            raise DomainError("the zero equation has no Frobenius structure")
        d = min(shifts)
        lead = coeffs[3]
        if 3 + d >= len(lead) or lead[3 + d] == 0.0:
            raise IrregularPointError("leading-order balance fails: point is not regular singular")
        self.d = d
        self.coeffs = coeffs
        self.width = max(shifts) - d + 1

    def _p(self, k: int, j: int) -> float:
        row = self.coeffs[k]
        return row[j] if 0 <= j < len(row) else 0.0

    def P(self, s: int, mu: float) -> float:
        return sum(self._p(k, k + self.d + s) * _ff(mu, k) for k in range(4))

    def dP(self, s: int, mu: float) -> float:
        return sum(self._p(k, k + self.d + s) * _dff(mu, k) for k in range(4))

    def indicial_poly(self) -> np.ndarray:
        """Coefficients of P_0(rho) in descending powers of rho."""
        poly = np.zeros(4)
        for k in range(4):
            c = self._p(k, k + self.d)
            if c == 0.0:
                continue
            falling = np.poly1d([1.0])
            for j in range(k):
                falling = falling * np.poly1d([1.0, -float(j)])
            poly[4 - len(falling.coeffs):] += c * falling.coeffs
        return poly


def _local_spec(spec: OdeSpec, at: int) -> OdeSpec:
    if at == 0:
        return spec
    if at == 1:
        return reflect_spec(spec)
    raise DomainError(f"expansion point must be 0 or 1, got {at}")


def indicial_roots(spec: OdeSpec, at: int = 0) -> tuple[float, float, float]:
    """The three local exponents at ``at`` in ascending order."""
    rec = _Recurrence(_local_spec(spec, at))
    poly = rec.indicial_poly()
    roots = np.roots(poly)
    if np.max(np.abs(roots.imag)) > 1e-8:
        raise UnsupportedError("complex indicial roots are not supported")
    out = []
    for r in np.sort(roots.real):
        # one Newton polish step on the exact cubic
        dp = np.polyder(poly)
        val, slope = np.polyval(poly, r), np.polyval(dp, r)
        if slope != 0.0:
            r = r - val / slope
        out.append(0.0 if abs(r) < 1e-14 else float(r))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FrobeniusSolution:
    expansion_point: int
    rho: float
    a: np.ndarray
    l: np.ndarray
    kappa: float
    resonance_order: int | None = None

    def __post_init__(self):
        if self.a[0] != 1.0:
            raise ValueError("Frobenius solutions are normalized by a[0] = 1")
        if self.expansion_point not in (0, 1):
            raise ValueError("expansion point must be 0 or 1")

    @property
    def N(self) -> int:
        return len(self.a) - 1

    @property
    def has_log(self) -> bool:
        return bool(np.any(self.l != 0.0))

    def __call__(self, lam: float) -> Jet3:
        return eval_jet(self, lam)


def _resonance_partner(roots, rho: float) -> int | None:
    partners = []
    for r in roots:
        m = r - rho
        n = round(m)
        if n >= 1 and abs(m - n) <= RESONANCE_TOL:
            partners.append(n)
    if len(partners) > 1:
        raise UnsupportedError("more than one resonant partner needs repeated logarithms")
    return partners[0] if partners else None


def expand(
    spec: OdeSpec,
    rho: float,
    N: int = DEFAULT_ORDER,
    at: int = 0,
    resonant_coeff: float = 0.0,
) -> FrobeniusSolution:
    """Frobenius solution t^rho (1 + O(t)) of ``spec`` about ``at``."""
    if N < 20:
        raise DomainError("use at least 20 terms")
    local = _local_spec(spec, at)
    rec = _Recurrence(local)
    roots = indicial_roots(spec, at)
    matches = [r for r in roots if abs(r - rho) <= RESONANCE_TOL]
    if not matches:
        raise DomainError(f"{rho} is not an indicial root (roots {roots})")
    rho = min(matches, key=lambda r: abs(r - rho))
    M = _resonance_partner(roots, rho)

    width = rec.width
    a = np.zeros(N + 1)
    l = np.zeros(N + 1)
    a[0] = 1.0
    for n in range(1, N + 1):
        mu = rho + n
        # P_s(mu - s) acting on index n - s
        ps = [rec.P(s, mu - s) if n - s >= 0 else 0.0 for s in range(width)]
        rhs_a = -sum(ps[s] * a[n - s] for s in range(1, width) if n - s >= 0)
        if M is not None and n >= M:
            dps = [rec.dP(s, mu - s) if n - s >= 0 else 0.0 for s in range(width)]
            if n == M:
                num = -rhs_a
                scale = sum(abs(ps[s] * a[n - s]) for s in range(1, width) if n - s >= 0)
                if abs(num) <= APPARENT_TOL * max(scale, 1e-300):
                    l[n] = 0.0
                else:
                    l[n] = num / dps[0]
                a[n] = resonant_coeff
                continue
            rhs_l = -sum(ps[s] * l[n - s] for s in range(1, width) if n - s >= 0)
            l[n] = rhs_l / ps[0]
            rhs_a += sum(dps[s] * l[n - s] for s in range(width) if n - s >= 0)
        a[n] = rhs_a / ps[0]
    return FrobeniusSolution(at, float(rho), a, l, spec.kappa, M)


def reflect(sol: FrobeniusSolution) -> FrobeniusSolution:
    """Same coefficients about the other endpoint: U(lambda) -> U(1 - lambda)."""
    return replace(sol, expansion_point=1 - sol.expansion_point)


def eval_jet(sol: FrobeniusSolution, lam: float) -> Jet3:
    """Value and first three lambda-derivatives of the series at ``lam``."""
    lam = float(lam)
    t = lam if sol.expansion_point == 0 else 1.0 - lam
    if not (0.0 < t):
        raise DomainError(f"lambda = {lam} is at or beyond the expansion point")
    if t > TRUST_RADIUS + 1e-12:
        raise TrustRegionError(f"|lambda - {sol.expansion_point}| = {t} exceeds {TRUST_RADIUS}")
    n = np.arange(sol.N + 1)
    mu = sol.rho + n
    logt = math.log(t)
    # t^(mu - k) computed stably as exp((mu - k) log t)
    base = np.exp(mu * logt)
    out = []
    for k in range(4):
        ff = np.ones_like(mu)
        dff = np.zeros_like(mu)
        for j in range(k):
            dff = dff * (mu - j) + ff
            ff = ff * (mu - j)
        pw = base / t**k
        val = np.dot(sol.a * ff, pw)
        if sol.resonance_order is not None:
            # d^k/dt^k [-t^mu log t] = -(ff log t + dff) t^(mu-k)
            val -= np.dot(sol.l * (ff * logt + dff), pw)
        out.append(float(val))
    if sol.expansion_point == 1:
        out = [out[0], -out[1], out[2], -out[3]]
    return Jet3(*out)
