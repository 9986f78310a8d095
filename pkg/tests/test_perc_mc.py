import math

import pytest

from cle4pt.errors import DegenerateError, DomainError, MemoryBudgetError
from cle4pt.perc_mc import (
    BYTES_PER_SITE,
    CSV_HEADER,
    MEMORY_BUDGET,
    McConfig,
    McTally,
    one_arm,
    points_for_lambda,
    rhombus_crossing,
    run_box,
)

L = 64


def cfg(lam, samples=2000, seed=3, workers=1, **kw):
    return McConfig(L, 2.0, points_for_lambda(lam, L, 2.0, 2, half_span=28), 2, samples, seed, workers, **kw)


def test_forbidden_pattern_never_occurs():
    for lam in (0.3, 0.5, 0.7):
        assert run_box(cfg(lam)).n_13_24 == 0


def test_counts_are_consistent():
    t = run_box(cfg(0.5))
    assert t.n_1234 + t.n_12_34 + t.n_14_23 + t.n_13_24 + t.n_other == t.samples
    assert t.total > 0
    assert 0 <= t.ratio_estimate <= 1


def test_seed_reproducibility():
    assert run_box(cfg(0.5, 500, seed=9)) == run_box(cfg(0.5, 500, seed=9))
    assert run_box(cfg(0.5, 500, seed=9)) != run_box(cfg(0.5, 500, seed=10))


def test_worker_split_is_deterministic():
    a = run_box(cfg(0.5, 400, seed=1, workers=2))
    b = run_box(cfg(0.5, 400, seed=1, workers=2))
    assert a == b


def test_relabeling_symmetry():
    """The (12)(34) share at lambda equals the (14)(23) share at 1 - lambda."""
    a = run_box(cfg(0.35, 6000, seed=11))
    b = run_box(cfg(0.65, 6000, seed=12))
    assert a.lam + b.lam == pytest.approx(1.0, abs=0.02)
    assert abs(a.ratio_12_34 - b.ratio_estimate) < 4 * math.hypot(a.stderr, b.stderr)


def test_far_boundary_condition_barely_matters():
    a = run_box(cfg(0.5, 3000, seed=5))
    b = run_box(cfg(0.5, 3000, seed=5, closed_far_boundary=False))
    assert abs(a.ratio_estimate - b.ratio_estimate) < 3 * a.stderr + 1e-12


def test_crossing_probability_is_one_half():
    r = rhombus_crossing(32, 4000, seed=2)
    assert abs(r.probability - 0.5) < 3 * r.stderr


def test_one_arm_exponent_and_stderr_scaling():
    r1 = one_arm([8, 16, 32, 64], 2000, seed=4)
    r2 = one_arm([8, 16, 32, 64], 4000, seed=4)
    assert 0.2 < r1.exponent < 0.45
    assert r2.stderrs[-1] / r1.stderrs[-1] == pytest.approx(1 / math.sqrt(2), rel=0.15)
    assert one_arm([8, 16, 32, 64], 300, seed=6) == one_arm([8, 16, 32, 64], 300, seed=6)


def test_config_validation():
    with pytest.raises(DegenerateError):
        McConfig(L, 2.0, (60, 62, 70, 80), 2, 10)
    with pytest.raises(DomainError):
        McConfig(L, 2.0, (2, 20, 40, 60), 2, 10)
    with pytest.raises(DomainError):
        McConfig(L, 1.0, (50, 60, 70, 80), 2, 10)
    with pytest.raises(DomainError):
        one_arm([8, 16, 32], 10)


def test_memory_budget():
    side = int(math.sqrt(MEMORY_BUDGET / BYTES_PER_SITE)) + 10
    with pytest.raises(MemoryBudgetError):
        rhombus_crossing(side, 1)


def test_points_for_lambda():
    pts = points_for_lambda(0.5, 512)
    c = McConfig(512, 2.0, pts, 3, 1)
    assert c.lam == pytest.approx(0.5, abs=0.01)


def test_csv_row():
    t = McTally(0.5, 10, 1, 2, 3, 0, 4)
    row = t.csv_row(64, 2)
    assert len(row.split(",")) == len(CSV_HEADER.split(","))
    assert row.startswith("0.5,64,2,10,1,2,3,0.5,")
