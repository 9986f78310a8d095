from fractions import Fraction

import mpmath
import numpy as np
import pytest

from cle4pt.errors import DomainError, TrustRegionError
from cle4pt.frobenius import FrobeniusSolution, eval_jet, expand, indicial_roots, reflect
from cle4pt.ode_core import KappaParams, make_boundary_ode, normalized_residual

KAPPAS = [Fraction(9, 2), Fraction(24, 5), Fraction(5), Fraction(16, 3), Fraction(6), Fraction(7), Fraction(15, 2)]


def spec_at(k):
    return make_boundary_ode(KappaParams.of(k))


@pytest.mark.parametrize("k", KAPPAS)
def test_indicial_roots_are_0_h_3h1(k):
    h = float(8 / k - 1)
    r = indicial_roots(spec_at(k))
    assert r == pytest.approx((0.0, h, 3 * h + 1), abs=1e-12)


@pytest.mark.parametrize("k", KAPPAS)
def test_series_residuals(k):
    spec = spec_at(k)
    for rho in indicial_roots(spec):
        sol = expand(spec, rho)
        for lam in np.arange(0.05, 0.601, 0.05):
            assert abs(normalized_residual(spec, eval_jet(sol, lam), lam)) < 1e-8


def test_kappa6_printed_coefficients():
    spec = spec_at(6)
    v0 = expand(spec, 0.0)
    v13 = expand(spec, 1 / 3)
    v2 = expand(spec, 2.0)
    assert abs(v0.a[1] + 2 / 3) < 1e-10
    assert abs(v0.l[2] - 8 / 45) < 1e-10
    assert v0.has_log and v0.resonance_order == 2
    assert abs(v13.a[1] + 0.5) < 1e-10
    assert abs(v2.a[1] - 1 / 3) < 1e-10
    assert not v2.has_log


def test_v2_matches_printed_hypergeometric_taylor_series():
    # F_S / lambda^2 = (1 - l)^2 3F2(4/3, 3/2, 7/3; 8/3, 3; 4 l (1 - l))
    f = lambda l: (1 - l) ** 2 * mpmath.hyp3f2(mpmath.mpf(4) / 3, 1.5, mpmath.mpf(7) / 3, mpmath.mpf(8) / 3, 3, 4 * l * (1 - l))
    ref = mpmath.taylor(f, 0, 8)
    v2 = expand(spec_at(6), 2.0)
    for n in range(9):
        assert abs(v2.a[n] - float(ref[n])) < 1e-12


def test_polynomial_solutions_at_special_kappa():
    v0 = expand(spec_at(Fraction(16, 3)), 0.0)
    assert v0.a[:4] == pytest.approx([1.0, -1.0, 1.0, 0.0], abs=1e-14)
    assert np.max(np.abs(v0.a[3:])) < 1e-14
    v0 = expand(spec_at(Fraction(24, 5)), 0.0)
    assert v0.a[:3] == pytest.approx([1.0, -4 / 3, 4 / 3], abs=1e-14)
    # the resonance at 24/5 is only apparent: no logarithm
    assert not v0.has_log


@pytest.mark.parametrize("k", [Fraction(5), Fraction(6), Fraction(7)])
def test_series_agree_with_numerical_integration(k):
    """Continue each series from 0.3 with an mpmath ODE solver and compare at 0.55."""
    spec = spec_at(k)
    coeffs = spec.exact
    P = [lambda x, c=c: sum(mpmath.mpf(ci.numerator) / ci.denominator * x**i for i, ci in enumerate(c)) for c in coeffs]
    for rho in indicial_roots(spec):
        sol = expand(spec, rho)
        j = eval_jet(sol, 0.3)
        rhs = lambda x, y: [y[1], y[2], -(P[2](x) * y[2] + P[1](x) * y[1] + P[0](x) * y[0]) / P[3](x)]
        F = mpmath.odefun(rhs, 0.3, [j.u, j.du, j.d2u])
        assert abs(float(F(0.55)[0]) - eval_jet(sol, 0.55).u) < 1e-10


def test_reflect_and_trust_region():
    sol = expand(spec_at(5), 0.0)
    r = reflect(sol)
    assert eval_jet(r, 0.8).u == pytest.approx(eval_jet(sol, 0.2).u)
    assert eval_jet(r, 0.8).du == pytest.approx(-eval_jet(sol, 0.2).du)
    with pytest.raises(TrustRegionError):
        eval_jet(sol, 0.7)
    with pytest.raises(DomainError):
        eval_jet(sol, 0.0)


def test_expand_errors():
    spec = spec_at(5)
    with pytest.raises(DomainError):
        expand(spec, 0.123)
    with pytest.raises(DomainError):
        expand(spec, 0.0, N=5)
    with pytest.raises(ValueError):
        FrobeniusSolution(0, 0.0, np.array([2.0, 0.0]), np.zeros(2), 5.0)
