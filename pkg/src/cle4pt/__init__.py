"""Boundary four-point connectivities of conformal loop ensembles for kappa in (4, 8)."""

from .closed_forms import SpecialKappa, a_fk, r_fk, v_exact
from .connection import boundary_basis, connect_basis, universal_ratio
from .errors import ConvergenceError, DomainError
from .frobenius import eval_jet, expand, indicial_roots
from .ode_core import KappaParams, cross_ratio, make_boundary_ode, make_bulk_ode

__version__ = "0.1.0"

__all__ = [
    "KappaParams",
    "SpecialKappa",
    "make_boundary_ode",
    "make_bulk_ode",
    "cross_ratio",
    "indicial_roots",
    "expand",
    "eval_jet",
    "boundary_basis",
    "connect_basis",
    "universal_ratio",
    "v_exact",
    "a_fk",
    "r_fk",
    "DomainError",
    "ConvergenceError",
]
