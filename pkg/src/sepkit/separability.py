"""Separability machinery: discriminant checks, an exact LP oracle,
covariance whitening, and the two-hyperplane cascade construction.

Conventions shared by all checks:

* A tie never separates.  Separation requires strict inequality, so a
  duplicated probe is reported as not separable.
* Margins are normalized by the weight norm, making them comparable
  across probes and invariant to rescaling of the functional.
* Checks that need a center use the known distribution center for ball
  samples and the empirical mean otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import (
    CascadeConstructionError,
    DegeneratePoint,
    DegenerateProbe,
    DimensionMismatch,
    InvalidArgument,
    OracleTooLarge,
    ProbeNotInLayer,
    SingularCovariance,
    TooManyViolators,
)
from .geometry import SampleSet, validate_point

ORACLE_MAX_POINTS = 500
ORACLE_MAX_DIM = 50

_COND_LIMIT = 1e12
_AUTO_RIDGE = 1e-6


@dataclass(frozen=True)
class LinearFunctional:
    """Affine test l(x) = <weights, x> - offset."""

    weights: np.ndarray
    offset: float

    def __post_init__(self):
        w = validate_point(self.weights)
        if not np.any(w != 0.0):
            raise InvalidArgument("functional weights must not all be zero")
        object.__setattr__(self, "weights", w)
        w.setflags(write=False)

    def __call__(self, x: np.ndarray) -> float:
        return float(np.dot(self.weights, x) - self.offset)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return points @ self.weights - self.offset

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.weights))


@dataclass(frozen=True)
class PointVerdict:
    separable: bool
    margin: float
    violator_count: int


@dataclass(frozen=True)
class SeparationReport:
    """Per-point separability verdicts plus the empirical frequency."""

    per_point: tuple[PointVerdict, ...]
    fraction_separable: float
    check_kind: str
    n: int
    m: int
    seed: int | None = None

    @classmethod
    def build(cls, verdicts: Sequence[PointVerdict], check_kind: str,
              n: int, m: int, seed: int | None = None) -> "SeparationReport":
        frac = sum(v.separable for v in verdicts) / len(verdicts)
        return cls(per_point=tuple(verdicts), fraction_separable=frac,
                   check_kind=check_kind, n=n, m=m, seed=seed)

    @property
    def event_holds(self) -> bool:
        return all(v.separable for v in self.per_point)

    def to_json(self) -> str:
        doc = {
            "check_kind": self.check_kind,
            "n": self.n,
            "M": self.m,
            "seed": self.seed,
            "fraction_separable": self.fraction_separable,
            "per_point": [
                {"separable": v.separable, "margin": v.margin, "violator_count": v.violator_count}
                for v in self.per_point
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["index,separable,margin,violator_count"]
        for i, v in enumerate(self.per_point):
            lines.append(f"{i},{int(v.separable)},{v.margin:.17g},{v.violator_count}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Discriminant of the mean-centered inner-product form
# ---------------------------------------------------------------------------


def fisher_functional(sample: SampleSet, probe_index: int) -> LinearFunctional:
    """Discriminant testing the probe against the rest of its sample:

        l(x) = <x_i - xbar, x - xbar> - |x_i - xbar|^2

    with xbar the sample mean.  l vanishes at the probe and is negative on
    every other point exactly when the probe is separable this way.
    """
    pts = sample.points
    if sample.m < 2:
        raise InvalidArgument("need at least 2 points")
    if not (0 <= probe_index < sample.m):
        raise InvalidArgument(f"probe index {probe_index} out of range")
    xbar = pts.mean(axis=0)
    w = pts[probe_index] - xbar
    wsq = float(np.dot(w, w))
    if wsq == 0.0:
        raise DegenerateProbe("probe coincides with the sample mean")
    offset = float(np.dot(w, xbar)) + wsq
    return LinearFunctional(weights=w, offset=offset)


def _fisher_flags(points: np.ndarray, probe_rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized all-or-nothing verdicts for many probes of one sample.

    Returns (separable, margin, violators) arrays over probe_rows. A probe
    sitting exactly on the mean is reported as not separable with -inf
    margin rather than raising, so sweeps stay total.
    """
    y = points - points.mean(axis=0)
    w = y[probe_rows]                       # (k, n)
    wsq = np.einsum("ij,ij->i", w, w)       # l(probe) threshold
    g = w @ y.T                             # (k, M) values of <w, x_j - xbar>
    g[np.arange(len(probe_rows)), probe_rows] = -np.inf
    best = g.max(axis=1)
    violators = (g >= wsq[:, None]).sum(axis=1)
    norms = np.sqrt(wsq)
    degenerate = wsq == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        margin = (wsq - best) / np.where(degenerate, 1.0, norms)
    separable = (best < wsq) & ~degenerate
    margin[degenerate] = -np.inf
    return separable, margin, violators


def fisher_report(sample: SampleSet, probe_indices: Sequence[int] | None = None) -> SeparationReport:
    """All-or-nothing separability of each probe via the discriminant sweep."""
    probes = np.arange(sample.m) if probe_indices is None else np.asarray(probe_indices, dtype=np.intp)
    if sample.m == 1:
        verdicts = [PointVerdict(True, math.inf, 0)]
        return SeparationReport.build(verdicts, "fisher", sample.n, sample.m, sample.seed)
    sep, margin, viol = _fisher_flags(sample.points, probes)
    verdicts = [PointVerdict(bool(s), float(mg), int(v)) for s, mg, v in zip(sep, margin, viol)]
    return SeparationReport.build(verdicts, "fisher", sample.n, sample.m, sample.seed)


def check_point_separable(sample: SampleSet, probe_index: int, kind: str = "fisher",
                          r: float | None = None,
                          whitening: "WhiteningTransform | None" = None) -> PointVerdict:
    """Is one probe separable from the rest of its sample?

    kind "fisher": discriminant sign test, strict on ties.
    kind "whitened": the same test after covariance whitening.
    kind "pairwise-r": the radial event |x_probe| > r and
        <x_j, x_probe/|x_probe|> < r for all j, on centered data.
    """
    if not (0 <= probe_index < sample.m):
        raise InvalidArgument(f"probe index {probe_index} out of range")
    if sample.m == 1:
        return PointVerdict(True, math.inf, 0)

    if kind == "fisher":
        f = fisher_functional(sample, probe_index)
        values = f.evaluate(sample.points)
    elif kind == "whitened":
        transform = whitening if whitening is not None else whiten(sample)
        white = SampleSet(points=transform.apply(sample.points), dist=sample.dist, seed=sample.seed)
        f = fisher_functional(white, probe_index)
        values = f.evaluate(white.points)
    elif kind == "pairwise-r":
        if r is None or not (0.0 < r < 1.0):
            raise InvalidArgument("kind pairwise-r needs r in (0, 1)")
        y = sample.points - sample.center()
        probe = y[probe_index]
        norm = float(np.linalg.norm(probe))
        if norm == 0.0:
            raise DegeneratePoint("probe has zero norm after centering")
        proj = y @ (probe / norm)
        proj[probe_index] = -np.inf
        worst = float(proj.max())
        violators = int(np.sum(proj >= r))
        margin = min(r - worst, norm - r)
        return PointVerdict(separable=(norm > r and worst < r), margin=margin,
                            violator_count=violators)
    else:
        raise InvalidArgument(f"unknown check kind {kind!r}")

    values[probe_index] = -np.inf
    worst = float(values.max())
    margin = -worst / f.norm
    violators = int(np.sum(values >= 0.0))
    return PointVerdict(separable=worst < 0.0, margin=margin, violator_count=violators)


def check_all_pairs(sample: SampleSet, r: float, kind: str = "pairwise") -> SeparationReport:
    """The all-pairs radial event on centered data.

    kind "pairwise": every norm exceeds r and <x_i, x_j/|x_j|> < r for all
    ordered pairs.  kind "angle": both sides normalized, i.e. pairwise
    cosines below r.  The report's per-point verdicts localize failures.
    """
    if not (0.0 < r < 1.0):
        raise InvalidArgument(f"r={r} must lie in (0, 1)")
    if kind not in ("pairwise", "angle"):
        raise InvalidArgument(f"unknown pair-check kind {kind!r}")
    y = sample.points - sample.center()
    m = sample.m
    norms = np.linalg.norm(y, axis=1)
    if np.any(norms == 0.0):
        raise DegeneratePoint("a point coincides with the center")
    g = y @ y.T
    proj = g / norms[None, :]           # proj[i, j] = <x_i, x_j/|x_j|>
    if kind == "angle":
        proj = proj / norms[:, None]
    np.fill_diagonal(proj, -np.inf)
    worst = proj.max(axis=0)            # over i for each target j
    violators = (proj >= r).sum(axis=0)
    verdicts = [
        PointVerdict(separable=bool(norms[j] > r and worst[j] < r),
                     margin=float(min(r - worst[j], norms[j] - r)),
                     violator_count=int(violators[j]))
        for j in range(m)
    ]
    label = "pairwise-r" if kind == "pairwise" else "angle-r"
    return SeparationReport.build(verdicts, label, sample.n, m, sample.seed)


# ---------------------------------------------------------------------------
# Covariance whitening
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WhiteningTransform:
    """Affine map y = factor^T (x - mean) with factor factor^T = (S + lam I)^-1,
    so whitened coordinates carry the inverse-covariance inner product."""

    mean: np.ndarray
    factor: np.ndarray               # lower-triangular
    lam: float
    condition_estimate: float

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return (pts - self.mean) @ self.factor

    def apply_point(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) @ self.factor

    @classmethod
    def identity(cls, mean: np.ndarray) -> "WhiteningTransform":
        n = len(mean)
        return cls(mean=np.asarray(mean, dtype=np.float64), factor=np.eye(n),
                   lam=0.0, condition_estimate=1.0)


def whiten(sample: SampleSet | np.ndarray, lam_policy: str | float = "auto") -> WhiteningTransform:
    """Whitening transform from the sample's empirical covariance.

    lam_policy "auto" adds a ridge 1e-6 tr(S)/n when the condition number
    exceeds 1e12; "none" raises on singular covariance; a float forces
    that ridge.
    """
    pts = sample.points if isinstance(sample, SampleSet) else np.asarray(sample, dtype=np.float64)
    m, n = pts.shape
    if m < 2:
        raise InvalidArgument("need at least 2 points to form a covariance")
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = (centered.T @ centered) / (m - 1)
    cond = float(np.linalg.cond(cov))

    if isinstance(lam_policy, str):
        if lam_policy == "auto":
            lam = _AUTO_RIDGE * float(np.trace(cov)) / n if (not np.isfinite(cond) or cond > _COND_LIMIT) else 0.0
        elif lam_policy == "none":
            lam = 0.0
        else:
            raise InvalidArgument(f"unknown lam policy {lam_policy!r}")
    else:
        lam = float(lam_policy)
        if lam < 0.0:
            raise InvalidArgument("ridge must be >= 0")

    if lam == 0.0 and (not np.isfinite(cond) or cond > 1e15):
        raise SingularCovariance(f"covariance is singular (cond ~ {cond:.3g}) and no ridge was applied")
    a = cov + lam * np.eye(n)
    try:
        inv = np.linalg.inv(a)
        factor = np.linalg.cholesky((inv + inv.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(
            f"covariance is singular (cond ~ {cond:.3g}) and the policy forbids a ridge"
        ) from exc
    return WhiteningTransform(mean=mean, factor=factor, lam=lam, condition_estimate=cond)


# ---------------------------------------------------------------------------
# Exact extreme-point oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleDecision:
    separable: bool
    witness: np.ndarray | None        # functional weights when separable
    certificate: np.ndarray | None    # convex coefficients over the others when not
    residual: float | None


def oracle_separable(sample: SampleSet, probe_index: int) -> OracleDecision:
    """Exact test of whether the probe lies outside the convex hull of the
    other points, by linear feasibility in the scaling-invariant margin
    form <w, x_probe - x_j> >= 1.  Infeasibility is certified by convex
    combination coefficients reproducing the probe.
    """
    m, n = sample.m, sample.n
    if m > ORACLE_MAX_POINTS or n > ORACLE_MAX_DIM:
        raise OracleTooLarge(f"oracle limited to M <= {ORACLE_MAX_POINTS}, n <= {ORACLE_MAX_DIM}")
    if not (0 <= probe_index < m):
        raise InvalidArgument(f"probe index {probe_index} out of range")
    if m == 1:
        return OracleDecision(True, np.zeros(n), None, None)

    probe = sample.points[probe_index]
    others = np.delete(sample.points, probe_index, axis=0)
    diffs = probe[None, :] - others

    sep = linprog(c=np.zeros(n), A_ub=-diffs, b_ub=-np.ones(m - 1),
                  bounds=[(None, None)] * n, method="highs")
    if sep.status == 0:
        return OracleDecision(True, np.asarray(sep.x), None, None)

    a_eq = np.vstack([others.T, np.ones((1, m - 1))])
    b_eq = np.concatenate([probe, [1.0]])
    member = linprog(c=np.zeros(m - 1), A_eq=a_eq, b_eq=b_eq,
                     bounds=[(0, None)] * (m - 1), method="highs")
    if member.status != 0:
        raise CascadeConstructionError("oracle reached an inconsistent LP state")
    alpha = np.asarray(member.x)
    residual = float(np.linalg.norm(others.T @ alpha - probe, np.inf))
    residual = max(residual, abs(float(np.sum(alpha)) - 1.0))
    return OracleDecision(False, None, alpha, residual)


# ---------------------------------------------------------------------------
# Two-hyperplane cascade separator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CascadeSeparator:
    """Conjunction of two half-space tests accepting exactly the probe.

    ``first`` is the radial hyperplane at threshold r; ``second`` handles
    the first's violators and its weights are orthogonal to the first's.
    Both functionals act on raw (uncentered) coordinates.
    """

    first: LinearFunctional
    second: LinearFunctional
    violators: tuple[int, ...]

    def accepts(self, x: np.ndarray) -> bool:
        return self.first(x) > 0.0 and self.second(x) > 0.0

    def accepts_batch(self, points: np.ndarray) -> np.ndarray:
        return (self.first.evaluate(points) > 0.0) & (self.second.evaluate(points) > 0.0)


_ORTHO_TOL = 1e-10


def _any_orthogonal_unit(u: np.ndarray) -> np.ndarray:
    basis = np.zeros_like(u)
    basis[int(np.argmin(np.abs(u)))] = 1.0
    y = basis - np.dot(basis, u) * u
    return y / np.linalg.norm(y)


def cascade_separate(sample: SampleSet, probe_index: int, r: float) -> CascadeSeparator:
    """Separate the probe by a radial hyperplane plus one orthogonal helper.

    On centered data the radial test <x, u> > r with u = probe/|probe|
    rejects everything outside the probe's cone; the at most n-1 cone
    violators are split off by a second hyperplane whose normal is
    orthogonal to u, found by exact linear feasibility.
    """
    if not (0.0 < r < 1.0):
        raise InvalidArgument(f"r={r} must lie in (0, 1)")
    if not (0 <= probe_index < sample.m):
        raise InvalidArgument(f"probe index {probe_index} out of range")
    center = sample.center()
    y = sample.points - center
    probe = y[probe_index]
    norm = float(np.linalg.norm(probe))
    if norm <= r:
        raise ProbeNotInLayer(f"|probe| = {norm:.6g} does not exceed r = {r:.6g}")
    u = probe / norm

    proj = y @ u
    proj_probe = proj[probe_index]
    mask = proj >= r
    mask[probe_index] = False
    violator_idx = np.flatnonzero(mask)
    k = len(violator_idx)
    n = sample.n
    if k > n - 1:
        raise TooManyViolators(f"{k} violators exceed the n-1 = {n - 1} capacity")

    # Fold the centering into the offsets so the functionals act on raw points.
    first = LinearFunctional(weights=u, offset=r + float(np.dot(u, center)))

    if k == 0:
        w2 = _any_orthogonal_unit(u) if n > 1 else u
        q = -math.inf if n > 1 else r + float(np.dot(u, center))
        second = LinearFunctional(weights=w2, offset=q)
    else:
        v = y[violator_idx]
        diffs = probe[None, :] - v
        res = linprog(c=np.zeros(n), A_ub=-diffs, b_ub=-np.ones(k),
                      A_eq=u[None, :], b_eq=[0.0],
                      bounds=[(None, None)] * n, method="highs")
        if res.status != 0:
            raise CascadeConstructionError("no orthogonal hyperplane splits the violators")
        w2 = np.asarray(res.x)
        w2 = w2 - np.dot(w2, u) * u
        if abs(float(np.dot(w2, u))) > _ORTHO_TOL * np.linalg.norm(w2):
            raise CascadeConstructionError("orthogonality could not be enforced")
        vals_v = v @ w2
        val_p = float(np.dot(probe, w2))
        q = 0.5 * (val_p + float(vals_v.max()))
        second = LinearFunctional(weights=w2, offset=q + float(np.dot(w2, center)))

    separator = CascadeSeparator(first=first, second=second,
                                 violators=tuple(int(i) for i in violator_idx))

    accepted = separator.accepts_batch(sample.points)
    expected = np.zeros(sample.m, dtype=bool)
    expected[probe_index] = True
    if not np.array_equal(accepted, expected):
        raise CascadeConstructionError("conjunction failed to isolate the probe")
    return separator
