"""Monte Carlo verification that empirical separation frequencies dominate
the analytic lower bounds, plus scripted reproduction of the headline
numeric claims.

Design notes:

* Trials are independent work units keyed by (master seed, stream, n,
  trial); aggregation is order-independent, so serial and threaded runs
  produce identical tables.  ``SEPKIT_THREADS`` caps the worker count.
* Verdicts are one-sided: empirical frequency must reach bound minus
  three binomial standard errors.  Below 50 trials the normal
  approximation is replaced by an exact binomial tail test.
* Every runner refuses configurations whose projected coordinate count
  exceeds its budget, so a typo cannot melt a laptop.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.stats import binom

from . import bounds
from .errors import InvalidArgument, ResourceBudgetExceeded
from .geometry import SampleSet, cube_spec, derive_key, sample_ball, sample_cube, spawn_rng
from .separability import _fisher_flags

DEFAULT_SEED = 123456789
DESK_BUDGET = 1.0e9
PAPER_BUDGET = 2.0e11

# Stream tags for the splittable seed contract.
_STREAM_FIG2_POINTS = 1
_STREAM_FIG2_PROBES = 2
_STREAM_VALIDATION = 3

# One-sided z=3 tail mass, for the exact-binomial small-sample verdict.
_Z3_TAIL = 0.0013498980316300933

_REMARK1_N = 100
_REMARK1_THETA = 0.01
_REMARK1_PAPER_CAP = 2_740_000
_REMARK1_SELECTED_M = 2_700_000
_REMARK1_TARGET_P = 0.99

_CASCADE_N = 100
_CASCADE_CASES = ((2.74e6, 5e-14), (7e16, 5e-9))

_INV_SQRT2 = math.sqrt(0.5)


def worker_count() -> int:
    raw = os.environ.get("SEPKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_trials(fn, trials: int):
    workers = worker_count()
    if workers == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _binomial_tolerance(freq: float, count: int) -> float:
    return 3.0 * math.sqrt(max(freq * (1.0 - freq), 0.0) / count)


def _one_sided_pass(successes: int, trials: int, bound: float) -> tuple[bool, float]:
    """Does the empirical frequency dominate the bound, one-sided at 3 sigma?

    Returns (verdict, tolerance).  With fewer than 50 trials the verdict
    uses the exact binomial tail under p = bound instead of the normal
    approximation (the tolerance is still reported for the record).
    """
    freq = successes / trials
    tol = _binomial_tolerance(freq, trials)
    if bound <= 0.0:
        return True, tol
    if trials < 50:
        p = min(bound, 1.0)
        return bool(binom.cdf(successes, trials, p) > _Z3_TAIL), tol
    return freq >= bound - tol, tol


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


# ---------------------------------------------------------------------------
# Cube separability sweep (empirical frequency vs dimension)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fig2Config:
    """Sweep configuration: for each dimension, ``trials`` cube samples of
    ``m`` points, ``n_probe`` probes per sample checked all-or-nothing."""

    dims: tuple[int, ...] = (100, 500, 1000, 2000, 5000)
    m: int = 2000
    n_probe: int = 400
    trials: int = 20
    seed: int = DEFAULT_SEED
    max_coords: float = DESK_BUDGET

    def __post_init__(self):
        if not self.dims or any(n < 1 for n in self.dims):
            raise InvalidArgument("dims must be a non-empty list of dimensions >= 1")
        if self.n_probe > self.m:
            raise InvalidArgument(f"n_probe={self.n_probe} cannot exceed M={self.m}")
        if self.trials < 1:
            raise InvalidArgument("trials must be >= 1")

    @classmethod
    def paper_scale(cls, dims: tuple[int, ...] = (100, 500, 1000, 2000, 5000),
                    seed: int = DEFAULT_SEED) -> "Fig2Config":
        return cls(dims=dims, m=20_000, n_probe=4_000, trials=100, seed=seed,
                   max_coords=PAPER_BUDGET)

    def projected_coords(self) -> float:
        return float(sum(self.trials * self.m * n for n in self.dims))


@dataclass(frozen=True)
class Fig2Row:
    n: int
    trials: int
    m: int
    n_probe: int
    mean_freq: float
    min_freq: float
    max_freq: float
    bound_eq12: float
    seed: int
    tolerance: float
    wall_time: float
    passed: bool


FIG2_CSV_HEADER = "n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed"


@dataclass(frozen=True)
class Fig2Table:
    rows: tuple[Fig2Row, ...]
    config: Fig2Config
    passed: bool

    def to_csv(self) -> str:
        lines = [FIG2_CSV_HEADER]
        for r in self.rows:
            lines.append(",".join(_fmt(v) for v in (
                r.n, r.trials, r.m, r.n_probe, r.mean_freq, r.min_freq,
                r.max_freq, r.bound_eq12, r.seed)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "experiment": "fig2",
            "pass": self.passed,
            "config": asdict(self.config),
            "rows": [asdict(r) for r in self.rows],
        }
        return json.dumps(doc, indent=2) + "\n"


def _fig2_trial_freq(config: Fig2Config, n: int, trial: int) -> float:
    sample_seed = derive_key(config.seed, _STREAM_FIG2_POINTS, n, trial) & (2**64 - 1)
    sample = sample_cube(n, config.m, sample_seed)
    probe_rng = spawn_rng(config.seed, _STREAM_FIG2_PROBES, n, trial)
    probes = probe_rng.choice(config.m, size=config.n_probe, replace=False)
    separable, _, _ = _fisher_flags(sample.points, np.asarray(probes, dtype=np.intp))
    return float(np.mean(separable))


def run_fig2(config: Fig2Config | None = None) -> Fig2Table:
    """Empirical all-or-nothing separability frequency per dimension, with
    the simplified cube estimate (at the uniform-cube variance 1/12)
    attached to each row."""
    config = config or Fig2Config()
    projected = config.projected_coords()
    if projected > config.max_coords:
        raise ResourceBudgetExceeded(
            f"projected {projected:.3g} coordinates exceed the budget {config.max_coords:.3g}")
    rows = []
    all_pass = True
    for n in config.dims:
        start = time.perf_counter()
        freqs = _map_trials(lambda t, n=n: _fig2_trial_freq(config, n, t), config.trials)
        wall = time.perf_counter() - start
        mean_freq = float(np.mean(freqs))
        bound = bounds.cube_single_simplified(n, config.m, 1.0 / 12.0).probability_lower_bound
        checks = config.trials * config.n_probe
        tol = _binomial_tolerance(mean_freq, checks)
        ok = bound <= 0.0 or mean_freq >= bound - tol
        all_pass = all_pass and ok
        rows.append(Fig2Row(n=n, trials=config.trials, m=config.m, n_probe=config.n_probe,
                            mean_freq=mean_freq, min_freq=float(np.min(freqs)),
                            max_freq=float(np.max(freqs)), bound_eq12=bound,
                            seed=config.seed, tolerance=tol, wall_time=wall, passed=ok))
    rows.sort(key=lambda r: r.n)
    return Fig2Table(rows=tuple(rows), config=config, passed=all_pass)


# ---------------------------------------------------------------------------
# Headline closed-form numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Remark1Report:
    """The simple sufficient condition at n=100, r=1/sqrt(2), theta=0.01,
    and the all-pairs bound at the advertised set size."""

    max_m_value: float
    max_m_floor: int
    cap: int
    selected_m: int
    pairwise_bound: float
    target_probability: float
    passed: bool

    def to_json(self) -> str:
        doc = {"experiment": "remark1", "pass": self.passed, **asdict(self)}
        return json.dumps(doc, indent=2) + "\n"


def run_remark1() -> Remark1Report:
    mm = bounds.ball_max_m_simple(_REMARK1_N, _INV_SQRT2, _REMARK1_THETA)
    pw = bounds.ball_pairwise(bounds.BallBoundParams(n=_REMARK1_N, m=_REMARK1_SELECTED_M, r=_INV_SQRT2))
    ok = mm.floor < _REMARK1_PAPER_CAP and pw.probability_lower_bound >= _REMARK1_TARGET_P
    return Remark1Report(max_m_value=mm.value, max_m_floor=mm.floor, cap=_REMARK1_PAPER_CAP,
                         selected_m=_REMARK1_SELECTED_M,
                         pairwise_bound=pw.probability_lower_bound,
                         target_probability=_REMARK1_TARGET_P, passed=ok)


@dataclass(frozen=True)
class CascadeExampleRow:
    m: float
    complement: float
    ceiling: float
    passed: bool


@dataclass(frozen=True)
class CascadeExamplesReport:
    rows: tuple[CascadeExampleRow, ...]
    passed: bool

    def to_json(self) -> str:
        doc = {"experiment": "cascade-examples", "pass": self.passed,
               "n": _CASCADE_N, "r": _INV_SQRT2,
               "rows": [asdict(r) for r in self.rows]}
        return json.dumps(doc, indent=2) + "\n"


def run_cascade_examples() -> CascadeExamplesReport:
    """Two-hyperplane bound at the two advertised set sizes; the computed
    complements must stay below their ceilings (5e-14 and 5e-9)."""
    rows = []
    for m, ceiling in _CASCADE_CASES:
        res = bounds.cascade_bound(_CASCADE_N, _INV_SQRT2, m)
        theta = math.exp(res.log_complement)
        rows.append(CascadeExampleRow(m=m, complement=theta, ceiling=ceiling,
                                      passed=theta < ceiling))
    return CascadeExamplesReport(rows=tuple(rows), passed=all(r.passed for r in rows))


# ---------------------------------------------------------------------------
# Bound-domination validation grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationCell:
    dist: str                 # "ball" | "cube"
    n: int
    m: int
    param: float              # r for ball, delta for cube


DEFAULT_BALL_GRID = tuple(
    ValidationCell("ball", n, m, r)
    for n in (20, 50, 100) for m in (100, 1000) for r in (0.6, _INV_SQRT2, 0.8)
)
DEFAULT_CUBE_GRID = tuple(ValidationCell("cube", n, 1000, 0.5) for n in (500, 1000, 2000))
DEFAULT_GRID = DEFAULT_BALL_GRID + DEFAULT_CUBE_GRID


@dataclass(frozen=True)
class ValidationRow:
    dist: str
    check: str
    n: int
    m: int
    param: float
    trials: int
    freq: float
    bound: float
    tolerance: float
    vacuous: bool
    passed: bool
    seed: int


VALIDATION_CSV_HEADER = "dist,check,n,M,param,trials,freq,bound,tolerance,vacuous,passed,seed"


@dataclass(frozen=True)
class ValidationTable:
    rows: tuple[ValidationRow, ...]
    trials: int
    seed: int
    passed: bool

    def to_csv(self) -> str:
        lines = [VALIDATION_CSV_HEADER]
        for r in self.rows:
            lines.append(",".join(_fmt(v) for v in (
                r.dist, r.check, r.n, r.m, r.param, r.trials, r.freq,
                r.bound, r.tolerance, r.vacuous, r.passed, r.seed)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {"experiment": "validate", "pass": self.passed, "trials": self.trials,
               "seed": self.seed, "rows": [asdict(r) for r in self.rows]}
        return json.dumps(doc, indent=2) + "\n"


def _ball_trial_events(n: int, m: int, seed: int, trial: int, r_values: tuple[float, ...]):
    sample_seed = derive_key(seed, _STREAM_VALIDATION, n, m, trial) & (2**64 - 1)
    pts = sample_ball(n, m, sample_seed).points
    norms = np.linalg.norm(pts, axis=1)
    gram = pts @ pts.T
    proj = gram / norms[None, :]
    cosines = proj / norms[:, None]
    np.fill_diagonal(proj, -np.inf)
    np.fill_diagonal(cosines, -np.inf)
    probe_col = proj[:, -1].copy()
    min_norm = norms.min()
    events = {}
    for r in r_values:
        events[("single", r)] = bool(norms[-1] > r and probe_col.max() < r)
        events[("pairwise", r)] = bool(min_norm > r and proj.max() < r)
        events[("angle", r)] = bool(min_norm > r and cosines.max() < r)
    return events


def _cube_trial_events(n: int, m: int, seed: int, trial: int, delta: float):
    sample_seed = derive_key(seed, _STREAM_VALIDATION, n, m, trial) & (2**64 - 1)
    sample = sample_cube(n, m, sample_seed)
    pts = sample.points
    mean = pts.mean(axis=0)
    y = pts - mean
    sq = np.einsum("ij,ij->i", y, y)
    r0sq = float(np.sum(sq) / (m - 1))
    in_layer = bool(np.all(sq >= (1.0 - delta) * r0sq) and np.all(sq <= (1.0 + delta) * r0sq))
    threshold = math.sqrt(1.0 - delta)
    r0 = math.sqrt(r0sq)
    norms = np.sqrt(sq)
    probe = y[-1]
    cone_single = y @ (probe / (norms[-1] * r0))
    cone_single[-1] = -np.inf
    single = bool(in_layer and cone_single.max() < threshold)
    proj = (y @ y.T) / (r0 * norms[None, :])
    np.fill_diagonal(proj, -np.inf)
    pairwise = bool(in_layer and proj.max() < threshold)
    return {"single": single, "pairwise": pairwise}


_BALL_BOUND_FNS = {"single": bounds.ball_single, "pairwise": bounds.ball_pairwise,
                   "angle": bounds.ball_angle}


def run_bound_validation(grid: tuple[ValidationCell, ...] = DEFAULT_GRID,
                         trials: int = 200, seed: int = DEFAULT_SEED,
                         max_coords: float = DESK_BUDGET) -> ValidationTable:
    """Empirical event frequencies versus the analytic lower bounds over a
    parameter grid.  A cell passes when its frequency dominates the bound
    minus three binomial standard errors (exact tail below 50 trials);
    vacuous bounds pass trivially."""
    projected = float(sum(trials * c.m * c.n for c in grid))
    if projected > max_coords:
        raise ResourceBudgetExceeded(
            f"projected {projected:.3g} coordinates exceed the budget {max_coords:.3g}")
    rows: list[ValidationRow] = []
    ball_groups: dict[tuple[int, int], list[float]] = {}
    for cell in grid:
        if cell.dist == "ball":
            ball_groups.setdefault((cell.n, cell.m), []).append(cell.param)
        elif cell.dist != "cube":
            raise InvalidArgument(f"unknown distribution {cell.dist!r} in grid")

    for (n, m), r_values in sorted(ball_groups.items()):
        r_tuple = tuple(sorted(set(r_values)))
        trial_events = _map_trials(
            lambda t: _ball_trial_events(n, m, seed, t, r_tuple), trials)
        for r in r_tuple:
            params = bounds.BallBoundParams(n=n, m=m, r=r)
            for check, fn in _BALL_BOUND_FNS.items():
                res = fn(params)
                successes = sum(ev[(check, r)] for ev in trial_events)
                ok, tol = _one_sided_pass(successes, trials, res.probability_lower_bound)
                rows.append(ValidationRow(
                    dist="ball", check=check, n=n, m=m, param=r, trials=trials,
                    freq=successes / trials, bound=res.probability_lower_bound,
                    tolerance=tol, vacuous=res.vacuous, passed=ok, seed=seed))

    for cell in (c for c in grid if c.dist == "cube"):
        params = bounds.CubeBoundParams(n=cell.n, m=cell.m, delta=cell.param,
                                        sigma0sq=1.0 / 12.0, r0sq=cell.n / 12.0)
        trial_events = _map_trials(
            lambda t: _cube_trial_events(cell.n, cell.m, seed, t, cell.param), trials)
        for check, fn in (("single", bounds.cube_single), ("pairwise", bounds.cube_pairwise)):
            res = fn(params)
            successes = sum(ev[check] for ev in trial_events)
            ok, tol = _one_sided_pass(successes, trials, res.probability_lower_bound)
            rows.append(ValidationRow(
                dist="cube", check=check, n=cell.n, m=cell.m, param=cell.param,
                trials=trials, freq=successes / trials,
                bound=res.probability_lower_bound, tolerance=tol,
                vacuous=res.vacuous, passed=ok, seed=seed))

    rows.sort(key=lambda r: (r.dist, r.n, r.m, r.param, r.check))
    return ValidationTable(rows=tuple(rows), trials=trials, seed=seed,
                           passed=all(r.passed for r in rows))
