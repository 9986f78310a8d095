"""Connection between the Frobenius bases at 0 and 1, and the constants
beta, C1/C2 and A built from it.

The basis at 0 is (V0, Vh, V3h1) with exponents (0, h, 3h + 1).  Reflected
solutions W_j(lambda) = V_j(1 - lambda) are written in that basis by matching
value and first two derivatives at lambda = 1/2; column j of ``matrix`` holds
the coordinates of W_j.

When V0 is resonant with V3h1 (kappa = 6), V0 is only fixed up to adding a
multiple of V3h1.  We pick the reflection-symmetric member, which makes
beta vanish.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IllConditionedError, MatchingError
from .frobenius import DEFAULT_ORDER, FrobeniusSolution, eval_jet, expand, indicial_roots, reflect
from .ode_core import Jet3, KappaParams, OdeSpec, make_boundary_ode, normalized_residual

__all__ = [
    "ConnectionResult",
    "BoundaryBasis",
    "boundary_basis",
    "connect_basis",
    "universal_ratio",
    "c2h_constant",
    "MATCH_POINT",
    "CHECK_POINT",
]

MATCH_POINT = 0.5
CHECK_POINT = 0.4
COND_LIMIT = 1e10
MATCH_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class ConnectionResult:
    kappa: float
    matrix: np.ndarray
    beta: float
    c1_over_c2: float
    A: float
    condition_estimate: float
    beta_consistency: float
    check_discrepancy: float


def _jet_matrix(sols, lam: float) -> np.ndarray:
    """3x3 matrix whose column j is (value, d1, d2) of sols[j] at lam."""
    cols = []
    for s in sols:
        j = eval_jet(s, lam)
        cols.append([j.u, j.du, j.d2u])
    return np.array(cols).T


def _match(basis, lam: float) -> tuple[np.ndarray, float]:
    B = _jet_matrix(basis, lam)
    W = _jet_matrix([reflect(s) for s in basis], lam)
    # column scaling keeps the condition number meaningful
    scale = np.max(np.abs(B), axis=0)
    Bs = B / scale
    cond = float(np.linalg.cond(Bs))
    M = np.linalg.solve(Bs, W) / scale[:, None]
    return M, cond


def _beta(M: np.ndarray) -> float:
    return -M[1, 0] / M[1, 2]


def _build(p: KappaParams, N: int, v0_coeff: float):
    spec = make_boundary_ode(p)
    r0, rh, r3 = indicial_roots(spec, 0)
    v0 = expand(spec, r0, N, resonant_coeff=v0_coeff)
    vh = expand(spec, rh, N)
    v3 = expand(spec, r3, N)
    return spec, (v0, vh, v3)


@dataclass(frozen=True, eq=False)
class BoundaryBasis:
    """The basis at 0 together with its connection data.  Evaluates any
    solution on (0, 1), switching to reflected series for lambda > 1/2."""

    params: KappaParams
    spec: OdeSpec
    solutions: tuple[FrobeniusSolution, FrobeniusSolution, FrobeniusSolution]
    connection: ConnectionResult

    def jets(self, lam: float) -> tuple[Jet3, Jet3, Jet3]:
        """Jets of (V0, Vh, V3h1) at lam."""
        if not 0.0 < lam < 1.0:
            raise DomainError(f"lambda = {lam} outside (0, 1)")
        if lam <= MATCH_POINT:
            return tuple(eval_jet(s, lam) for s in self.solutions)
        w = [eval_jet(reflect(s), lam) for s in self.solutions]
        minv = self._minv
        out = []
        for i in range(3):
            acc = Jet3(0.0)
            for j in range(3):
                acc = acc + w[j].scale(minv[j, i])
            out.append(acc)
        return tuple(out)

    @functools.cached_property
    def _minv(self) -> np.ndarray:
        return np.linalg.inv(self.connection.matrix)

    def total_jet(self, lam: float) -> Jet3:
        v0, _, v3 = self.jets(lam)
        return v0 + v3.scale(self.connection.beta)

    def ratio(self, lam: float) -> float:
        v0, _, v3 = self.jets(lam)
        c = self.connection
        return c.c1_over_c2 * v3.u / (v0.u + c.beta * v3.u)

    def ratio_jet(self, lam: float) -> Jet3:
        v0, _, v3 = self.jets(lam)
        c = self.connection
        return v3.scale(c.c1_over_c2) / (v0 + v3.scale(c.beta))

    def max_residual(self, lam: float) -> float:
        return max(abs(normalized_residual(self.spec, j, lam)) for j in self.jets(lam))


def _connect(p: KappaParams, N: int, v0_coeff: float):
    spec, basis = _build(p, N, v0_coeff)
    M, cond = _match(basis, MATCH_POINT)
    return spec, basis, M, cond


@functools.lru_cache(maxsize=64)
def boundary_basis(p: KappaParams, N: int = DEFAULT_ORDER) -> BoundaryBasis:
    if not (4 < p.exact < 8):
        raise DomainError(f"connection is defined for kappa in (4, 8), got {p.kappa}")
    spec, basis, M, cond = _connect(p, N, 0.0)
    v0 = basis[0]
    if v0.resonance_order is not None and abs(v0.rho + v0.resonance_order - basis[2].rho) < 1e-9:
        # shift V0 by beta * V3h1 to make it reflection-symmetric
        spec, basis, M, cond = _connect(p, N, _beta(M))
    if cond > COND_LIMIT:
        raise IllConditionedError(f"matching matrix condition {cond:.3g} exceeds {COND_LIMIT:g}")
    M_check, _ = _match(basis, CHECK_POINT)
    disc = float(np.max(np.abs(M - M_check)))
    if disc > MATCH_TOL:
        raise MatchingError(f"matching at {MATCH_POINT} and {CHECK_POINT} differ by {disc:.3g}")
    beta = _beta(M)
    c1c2 = 1.0 / M[0, 2]
    result = ConnectionResult(
        kappa=p.kappa,
        matrix=M,
        beta=float(beta),
        c1_over_c2=float(c1c2),
        A=float(c1c2),
        condition_estimate=cond,
        beta_consistency=float(M[0, 0] + beta * M[0, 2] - 1.0),
        check_discrepancy=disc,
    )
    return BoundaryBasis(p, spec, basis, result)


def connect_basis(p: KappaParams, N: int = DEFAULT_ORDER) -> ConnectionResult:
    """Connection matrix and identification constants at kappa."""
    return boundary_basis(p, N).connection


def universal_ratio(p: KappaParams, lam: float, N: int = DEFAULT_ORDER) -> float:
    """R(lambda) = (C1/C2) V3h1 / (V0 + beta V3h1), normalized by R(1) = 1."""
    return boundary_basis(p, N).ratio(lam)


def c2h_constant() -> float:
    """Coefficient of lambda^2 |log lambda| in V0 at kappa = 6."""
    spec = make_boundary_ode(KappaParams.of(6))
    return float(expand(spec, 0.0).l[2])
