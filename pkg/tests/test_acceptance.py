"""Acceptance criteria 1-12.

Each criterion is a function returning (passed, detail).  Under pytest every
criterion is one test and a PASS/FAIL table is printed in the terminal
summary; ``python3 tests/test_acceptance.py`` prints the same table.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from cle4pt.bulk_boundary import BulkPoint, bulk_solution_jet, mobius_covariance_factor
from cle4pt.closed_forms import SOLUTIONS, SpecialKappa, a_fk, r_fk, r_fk_complement, v_exact_jet, z_check
from cle4pt.connection import boundary_basis
from cle4pt.frobenius import eval_jet, expand, indicial_roots
from cle4pt.ode_core import KappaParams, fusion_pde_residual, make_boundary_ode, make_bulk_ode, normalized_residual
from cle4pt.perc_mc import McConfig, one_arm, points_for_lambda, rhombus_crossing, run_box

A_EXACT = 8 * math.sqrt(3) * math.pi * math.sin(2 * math.pi / 9) / (135 * math.cos(5 * math.pi / 18))
KAPPAS = [Fraction(9, 2), Fraction(24, 5), Fraction(5), Fraction(16, 3), Fraction(6), Fraction(7), Fraction(15, 2)]

RESULTS: dict[int, tuple[bool, str]] = {}


def P(k):
    return KappaParams.of(k)


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for k in KAPPAS:
        spec = make_boundary_ode(P(k))
        for rho in indicial_roots(spec):
            sol = expand(spec, rho)
            for lam in np.arange(0.05, 0.601, 0.05):
                worst = max(worst, abs(normalized_residual(spec, eval_jet(sol, lam), lam)))
    dt = time.perf_counter() - t0
    return worst <= 1e-8 and dt < 5.0, f"max residual {worst:.2e}, {dt:.2f} s"


def criterion_2():
    spec = make_boundary_ode(P(6))
    v0, v13, v2 = (expand(spec, r) for r in (0.0, 1 / 3, 2.0))
    errs = [abs(v0.a[1] + 2 / 3), abs(v0.l[2] - 8 / 45), abs(v13.a[1] + 0.5), abs(v2.a[1] - 1 / 3)]
    return max(errs) <= 1e-10, f"max coefficient error {max(errs):.2e}"


def criterion_3():
    b = boundary_basis(P(6))
    lam = np.geomspace(1e-4, 1e-2, 25)
    y = np.array([b.ratio(l) / l**2 for l in lam])
    L = np.abs(np.log(lam))
    X = np.column_stack([np.ones_like(lam), lam, lam**2 * L, lam**2, lam**3 * L, lam**3])
    c = np.linalg.lstsq(X, y, rcond=None)[0]
    a_err = abs(c[0] - A_EXACT)
    lin = c[1] / c[0]
    return a_err <= 1e-6 and abs(lin - 1.0) <= 0.02, f"|A - closed form| {a_err:.2e}, lambda coefficient {lin:.6f}"


def criterion_4():
    a_fk.cache_clear()
    t0 = time.perf_counter()
    v = a_fk()
    dt = time.perf_counter() - t0
    return abs(v - 1.19948) <= 2e-5 and dt < 2.0, f"A_FK {v:.8f}, diff {abs(v - 1.19948):.2e}, {dt:.2f} s"


def criterion_5():
    eps = np.geomspace(1e-4, 1e-2, 25)
    y = np.array([r_fk_complement(e) / (a_fk() * math.sqrt(e)) for e in eps])
    X = np.column_stack([np.ones_like(eps), eps, eps**2 * np.abs(np.log(eps)), eps**2])
    c0, c1, cl, _ = np.linalg.lstsq(X, y, rcond=None)[0]
    e0 = abs(c0 / (64 / (21 * math.pi)) - 1)
    e1 = abs(c1 / (16 / (21 * math.pi)) - 1)
    el = abs(cl / (2 / (5 * math.pi)) - 1)
    ok = e0 <= 0.01 and e1 <= 0.03 and el <= 0.10
    return ok, f"relative errors c0 {e0:.1e}, c1 {e1:.1e}, c_L {el:.1e}"


def criterion_6():
    beta = max(abs(boundary_basis(P(k)).connection.beta) for k in (Fraction(6), Fraction(16, 3), Fraction(24, 5)))
    disc = max(boundary_basis(P(k)).connection.check_discrepancy for k in (5, 7))
    inv = 0.0
    for k in KAPPAS:
        M = boundary_basis(P(k)).connection.matrix
        inv = max(inv, float(np.max(np.abs(M @ M - np.eye(3)))))
    ok = beta <= 1e-8 and disc <= 1e-7 and inv <= 1e-8
    return ok, f"max |beta| {beta:.1e}, dual matching {disc:.1e}, involution {inv:.1e}"


def criterion_7():
    taus = np.geomspace(1e-3, 1e-2, 8)
    slopes = {str(k): z_check(P(k), taus) for k in (Fraction(5), Fraction(16, 3), Fraction(6), Fraction(7))}
    ok = all(1.9 <= s <= 2.1 for s in slopes.values())
    detail = ", ".join(f"kappa={k}: {s:.4f}" for k, s in slopes.items())
    return ok, detail + " (inf: deviation vanishes identically)"


def criterion_8():
    p = P(6)
    b = boundary_basis(p)
    worst = 0.0
    for idx in (0, 2):
        U = lambda lam, i=idx: b.jets(lam)[i]
        for cfg in ((-1.0, 0.0, 1.0, 3.0), (-2.0, 0.0, 1.0, 2.0), (-1.0, 0.0, 2.0, 5.0)):
            worst = max(worst, abs(fusion_pde_residual(U, p, *cfg)))
    return worst <= 1e-4, f"max normalized PDE residual {worst:.2e}"


def criterion_9():
    worst, worst_quad = 0.0, 0.0
    grid = np.linspace(0.02, 0.98, 50)
    for sk, table in SOLUTIONS.items():
        spec = make_boundary_ode(sk.params)
        for label in table:
            quad = label == "V5/2"
            hi = 0.45 if (sk is SpecialKappa.K6 or quad) else 1.0
            r = max(abs(normalized_residual(spec, v_exact_jet(sk, label, l), l)) for l in grid if l <= hi)
            if quad:
                worst_quad = max(worst_quad, r)
            else:
                worst = max(worst, r)
    sk = SpecialKappa.K24_5
    ident = max(
        abs(v_exact_jet(sk, "V3", l).u - v_exact_jet(sk, "V0", l).u + 4 / 3 * v_exact_jet(sk, "V2/3", 1 - l).u)
        for l in grid
    )
    ok = worst <= 1e-9 and worst_quad <= 1e-4 and ident <= 1e-10
    return ok, f"residual {worst:.1e}, quadrature-based {worst_quad:.1e}, V3 identity {ident:.1e}"


def criterion_10():
    worst, weakest = 0.0, math.inf
    for k in np.linspace(4.2, 7.8, 20):
        p = P(float(k))
        for lam in (0.3, 0.7, 1.3):
            j = bulk_solution_jet(lam, 1.0, 0.0, 0.0, p)
            worst = max(worst, abs(normalized_residual(make_bulk_ode(p), j, lam)))
            for d in (1e-3, -1e-3):
                weakest = min(weakest, abs(normalized_residual(make_bulk_ode(p, p.alpha + d), j, lam)))
    p6 = P(6)
    pt = BulkPoint(-0.7, 1.9, 0.3, 0.8)
    cov = max(abs(mobius_covariance_factor(pt, p6, *m) - 1) for m in ((2.0, 1.0, 0.0, 1.0), (0.0, -1.0, 1.0, 0.0)))
    ok = worst <= 1e-8 and weakest > 1e-4 and cov <= 1e-10 and p6.alpha_exact == Fraction(5, 48)
    return ok, f"residual {worst:.1e}, perturbed {weakest:.2e}, covariance {cov:.1e}, alpha(6) {p6.alpha_exact}"


MC_L, MC_W, MC_SAMPLES = 512, 3, 200_000


def criterion_11():
    t0 = time.perf_counter()
    b = boundary_basis(P(6))
    parts, ok = [], True
    for lam in (0.3, 0.5, 0.7):
        cfg = McConfig(MC_L, 2.0, points_for_lambda(lam, MC_L, 2.0, MC_W), MC_W, MC_SAMPLES, seed=1)
        t = run_box(cfg)
        exact = b.ratio(t.lam)
        rel = abs(t.ratio_estimate / exact - 1)
        ok &= rel <= 0.10 and t.n_13_24 == 0
        parts.append(f"lambda {t.lam:.3f}: {t.ratio_estimate:.4f}+-{t.stderr:.4f} vs {exact:.4f} ({rel:.1%}), n_13_24={t.n_13_24}")
    sweep = []
    for w in (2, 4):
        cfg = McConfig(MC_L, 2.0, points_for_lambda(0.5, MC_L, 2.0, w), w, MC_SAMPLES // 4, seed=2)
        t = run_box(cfg)
        sweep.append(f"w={w}: {t.ratio_estimate:.4f}+-{t.stderr:.4f} vs {b.ratio(t.lam):.4f}")
    cr = rhombus_crossing(128, 20_000, seed=3)
    cross_ok = abs(cr.probability - 0.5) <= 3 * cr.stderr
    arm = one_arm([16, 32, 64, 128, 256], 20_000, seed=4)
    arm_ok = 0.30 <= arm.exponent <= 0.36
    ok = bool(ok and cross_ok and arm_ok)
    dt = time.perf_counter() - t0
    detail = "; ".join(parts + sweep) + (
        f"; crossing {cr.probability:.4f}+-{cr.stderr:.4f}; one-arm exponent {arm.exponent:.4f}; {dt:.0f} s"
    )
    return ok, detail


def criterion_12():
    b = boundary_basis(P(Fraction(16, 3)))
    diff = max(abs(b.ratio(l) - r_fk(l)) for l in np.linspace(0.1, 0.9, 33))
    return diff <= 1e-7, f"max |R - r_fk| {diff:.1e}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


@pytest.mark.parametrize("number", [pytest.param(i, marks=pytest.mark.slow) if i == 11 else i for i in CRITERIA])
def test_criterion(number):
    passed, detail = CRITERIA[number]()
    RESULTS[number] = (passed, detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, detail


def report() -> str:
    lines = ["acceptance criteria:"]
    for i in sorted(RESULTS):
        passed, detail = RESULTS[i]
        lines.append(f"  {i:2d} {'PASS' if passed else 'FAIL'}  {detail}")
    return "\n".join(lines)


if __name__ == "__main__":
    for i, fn in CRITERIA.items():
        RESULTS[i] = fn()
        print(f"criterion {i}: {'PASS' if RESULTS[i][0] else 'FAIL'} ({RESULTS[i][1]})", flush=True)
