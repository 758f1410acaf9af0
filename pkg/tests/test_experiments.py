import json
import math

import numpy as np
import pytest

from sepkit.bounds import ball_max_m_simple
from sepkit.errors import InvalidArgument, ResourceBudgetExceeded
from sepkit.experiments import (
    DEFAULT_GRID,
    Fig2Config,
    ValidationCell,
    _one_sided_pass,
    run_bound_validation,
    run_cascade_examples,
    run_fig2,
    run_remark1,
)

INV_SQRT2 = math.sqrt(0.5)


# ---------------------------------------------------------------------------
# remark-1 and cascade reports
# ---------------------------------------------------------------------------


def test_remark1_report_values():
    rep = run_remark1()
    assert rep.passed
    assert rep.max_m_floor == 2_739_707        # exact-arithmetic value
    assert rep.max_m_floor < rep.cap == 2_740_000
    assert rep.pairwise_bound >= rep.target_probability == 0.99
    assert rep.pairwise_bound == pytest.approx(0.9967625884611522, rel=1e-12)
    doc = json.loads(rep.to_json())
    assert doc["pass"] is True
    assert doc["max_m_floor"] == 2_739_707


def test_remark1_theta_scaling():
    # halving theta scales the admissible M by 1/sqrt(2)
    full = ball_max_m_simple(100, INV_SQRT2, 0.01)
    half = ball_max_m_simple(100, INV_SQRT2, 0.005)
    assert half.value == pytest.approx(full.value / math.sqrt(2.0), rel=1e-12)


def test_cascade_examples_report():
    rep = run_cascade_examples()
    assert rep.passed
    first, second = rep.rows
    assert first.m == 2.74e6 and first.complement < first.ceiling == 5e-14
    assert second.m == 7e16 and second.complement < second.ceiling == 5e-9
    doc = json.loads(rep.to_json())
    assert doc["pass"] is True and len(doc["rows"]) == 2


# ---------------------------------------------------------------------------
# cube sweep
# ---------------------------------------------------------------------------


def test_fig2_tiny_config_has_discrete_frequencies():
    table = run_fig2(Fig2Config(dims=(3,), m=2, n_probe=2, trials=1, seed=5))
    assert table.rows[0].mean_freq in (0.0, 0.5, 1.0)


def test_fig2_reproducible_csv_bytes():
    cfg = Fig2Config(dims=(10, 25), m=60, n_probe=20, trials=4, seed=12)
    a = run_fig2(cfg).to_csv()
    b = run_fig2(Fig2Config(dims=(10, 25), m=60, n_probe=20, trials=4, seed=12)).to_csv()
    assert a == b
    changed = run_fig2(Fig2Config(dims=(10, 25), m=60, n_probe=20, trials=4, seed=13)).to_csv()
    assert changed != a


def test_fig2_csv_schema():
    table = run_fig2(Fig2Config(dims=(8,), m=30, n_probe=10, trials=2, seed=3))
    lines = table.to_csv().splitlines()
    assert lines[0] == "n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed"
    row = lines[1].split(",")
    assert row[0] == "8" and row[1] == "2" and row[2] == "30" and row[3] == "10"
    assert row[8] == "3"


def test_fig2_rows_sorted_and_consistent():
    table = run_fig2(Fig2Config(dims=(20, 5, 10), m=40, n_probe=15, trials=3, seed=9))
    ns = [r.n for r in table.rows]
    assert ns == sorted(ns)
    for r in table.rows:
        assert 0.0 <= r.min_freq <= r.mean_freq <= r.max_freq <= 1.0


def test_fig2_budget_guard():
    with pytest.raises(ResourceBudgetExceeded):
        run_fig2(Fig2Config(dims=(5000,), m=20000, n_probe=400, trials=100))


def test_fig2_config_validation():
    with pytest.raises(InvalidArgument):
        Fig2Config(dims=(5,), m=10, n_probe=20, trials=1)
    with pytest.raises(InvalidArgument):
        Fig2Config(dims=(), m=10, n_probe=5, trials=1)


def test_fig2_paper_scale_settings():
    cfg = Fig2Config.paper_scale()
    assert cfg.m == 20_000 and cfg.n_probe == 4_000 and cfg.trials == 100


def test_fig2_thread_count_does_not_change_results(monkeypatch):
    cfg = Fig2Config(dims=(12, 30), m=80, n_probe=25, trials=6, seed=21)
    serial = run_fig2(cfg).to_csv()
    monkeypatch.setenv("SEPKIT_THREADS", "4")
    threaded = run_fig2(cfg).to_csv()
    assert serial == threaded


# ---------------------------------------------------------------------------
# validation harness
# ---------------------------------------------------------------------------


def test_validation_verdict_rules():
    # vacuous bounds pass trivially
    ok, _ = _one_sided_pass(0, 10, 0.0)
    assert ok
    # exact binomial below 50 trials: 0 of 20 under p=0.9 is hopeless
    bad, _ = _one_sided_pass(0, 20, 0.9)
    assert not bad
    good, _ = _one_sided_pass(19, 20, 0.9)
    assert good
    # normal approximation at larger counts
    ok, tol = _one_sided_pass(190, 200, 0.93)
    assert ok and tol == pytest.approx(3 * math.sqrt(0.95 * 0.05 / 200))
    bad, _ = _one_sided_pass(150, 200, 0.93)
    assert not bad


def test_validation_small_grid_passes_and_serializes():
    grid = (ValidationCell("ball", 20, 100, 0.8), ValidationCell("cube", 200, 50, 0.5))
    table = run_bound_validation(grid=grid, trials=40, seed=3)
    assert table.passed
    lines = table.to_csv().splitlines()
    assert lines[0] == "dist,check,n,M,param,trials,freq,bound,tolerance,vacuous,passed,seed"
    assert len(lines) == 1 + 3 + 2  # three ball checks, two cube checks
    doc = json.loads(table.to_json())
    assert doc["pass"] is True
    assert {r["check"] for r in doc["rows"]} == {"single", "pairwise", "angle"}


def test_validation_reproducible():
    grid = (ValidationCell("ball", 15, 60, 0.75),)
    a = run_bound_validation(grid=grid, trials=25, seed=7).to_csv()
    b = run_bound_validation(grid=grid, trials=25, seed=7).to_csv()
    assert a == b


def test_validation_vacuous_cells_pass_trivially():
    # low dimension, large M: all bounds vacuous
    grid = (ValidationCell("ball", 5, 200, 0.6),)
    table = run_bound_validation(grid=grid, trials=10, seed=1)
    assert all(r.vacuous for r in table.rows)
    assert table.passed


def test_validation_budget_guard():
    grid = (ValidationCell("cube", 5000, 100000, 0.5),)
    with pytest.raises(ResourceBudgetExceeded):
        run_bound_validation(grid=grid, trials=200)


def test_validation_rejects_unknown_distribution():
    with pytest.raises(InvalidArgument):
        run_bound_validation(grid=(ValidationCell("torus", 5, 10, 0.5),), trials=5)


def test_default_grid_matches_advertised_cells():
    ball_cells = [c for c in DEFAULT_GRID if c.dist == "ball"]
    cube_cells = [c for c in DEFAULT_GRID if c.dist == "cube"]
    assert {c.n for c in ball_cells} == {20, 50, 100}
    assert {c.m for c in ball_cells} == {100, 1000}
    assert {round(c.param, 6) for c in ball_cells} == {0.6, round(INV_SQRT2, 6), 0.8}
    assert [(c.n, c.m, c.param) for c in cube_cells] == [(500, 1000, 0.5), (1000, 1000, 0.5), (2000, 1000, 0.5)]
