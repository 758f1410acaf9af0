"""Domain types and seeded samplers for the three distribution families.

Supported families: the uniform distribution on the n-dimensional unit
ball, the uniform distribution on the unit cube [0,1]^n, and product
distributions on the cube with a per-coordinate variance floor.

Sampling is counter-based (Philox) and splittable: point ``j`` of stream
``(seed, *path)`` is a pure function of the key and the point index, so
serial and block-parallel generation produce identical points.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import numpy as np
from scipy.special import ndtri

from .errors import DimensionMismatch, InsufficientData, InvalidArgument

Point = np.ndarray

BINARY_MAGIC = b"SEPK1"

# Philox-4x64 emits 4 uint64 words per counter block; Generator.random()
# consumes one word per double.  Per-point draw budgets are padded to a
# whole number of blocks so any point range can be generated independently.
_WORDS_PER_BLOCK = 4


def _as_matrix(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise InvalidArgument(f"expected an M x n point matrix, got shape {pts.shape}")
    return pts


def validate_point(p: np.ndarray) -> np.ndarray:
    """Check the coordinate-vector invariants (n >= 1, all finite)."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidArgument(f"a point must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument("point has non-finite coordinates")
    return arr


# ---------------------------------------------------------------------------
# Coordinate generators for the product family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformInterval:
    """Uniform on [a, b] with [a, b] inside [0, 1]."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b <= 1.0):
            raise InvalidArgument(f"uniform interval [{self.a}, {self.b}] must satisfy 0 <= a < b <= 1")

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    def transform(self, u: np.ndarray) -> np.ndarray:
        return self.a + (self.b - self.a) * u


@dataclass(frozen=True)
class Bernoulli:
    """Two-point distribution on {0, 1} with success probability p."""

    p: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise InvalidArgument(f"bernoulli p={self.p} must lie strictly in (0, 1)")

    @property
    def mean(self) -> float:
        return self.p

    @property
    def variance(self) -> float:
        return self.p * (1.0 - self.p)

    def transform(self, u: np.ndarray) -> np.ndarray:
        return (u < self.p).astype(np.float64)


@dataclass(frozen=True)
class DiscreteMixture:
    """Finite distribution on values inside [0, 1] with given weights."""

    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.weights) or not self.values:
            raise InvalidArgument("values and weights must be non-empty and equal length")
        if any(v < 0.0 or v > 1.0 for v in self.values):
            raise InvalidArgument("mixture values must lie in [0, 1]")
        if any(w < 0.0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0, rel_tol=1e-9):
            raise InvalidArgument("weights must be non-negative and sum to 1")

    @property
    def mean(self) -> float:
        return sum(v * w for v, w in zip(self.values, self.weights))

    @property
    def variance(self) -> float:
        m = self.mean
        return sum(w * (v - m) ** 2 for v, w in zip(self.values, self.weights))

    def transform(self, u: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(cum, u, side="right")
        idx = np.minimum(idx, len(self.values) - 1)
        return np.asarray(self.values, dtype=np.float64)[idx]


CoordinateGenerator = Union[UniformInterval, Bernoulli, DiscreteMixture]


# ---------------------------------------------------------------------------
# Distribution specs and sample sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionSpec:
    """Which family a sample was drawn from, plus product-family detail.

    ``generators`` and ``variance_floor`` are set for the product family
    only; every generator's variance must reach the floor.
    """

    kind: str  # "ball" | "cube" | "product"
    generators: tuple[CoordinateGenerator, ...] | None = None
    variance_floor: float | None = None

    def __post_init__(self):
        if self.kind not in ("ball", "cube", "product"):
            raise InvalidArgument(f"unknown distribution kind {self.kind!r}")
        if self.kind == "product":
            if not self.generators:
                raise InvalidArgument("product distribution needs per-coordinate generators")
            floor = self.variance_floor
            if floor is None or floor <= 0.0:
                raise InvalidArgument("product distribution needs a variance floor > 0")
            for k, g in enumerate(self.generators):
                if g.variance < floor:
                    raise InvalidArgument(
                        f"coordinate {k}: variance {g.variance:.6g} below the floor {floor:.6g}"
                    )
        elif self.generators is not None or self.variance_floor is not None:
            raise InvalidArgument(f"{self.kind} distribution takes no generators")

    def center(self, n: int) -> np.ndarray:
        """Distribution mean vector."""
        if self.kind == "ball":
            return np.zeros(n)
        if self.kind == "cube":
            return np.full(n, 0.5)
        self._check_n(n)
        return np.array([g.mean for g in self.generators])

    def coordinate_variances(self, n: int) -> np.ndarray:
        if self.kind == "ball":
            raise InvalidArgument("per-coordinate variances are a cube/product notion")
        if self.kind == "cube":
            return np.full(n, 1.0 / 12.0)
        self._check_n(n)
        return np.array([g.variance for g in self.generators])

    def r0_squared(self, n: int) -> float:
        """Sum of coordinate variances (squared concentration radius about the mean)."""
        return float(np.sum(self.coordinate_variances(n)))

    def supports(self, points: np.ndarray) -> bool:
        """True when every point satisfies the family's support constraint."""
        pts = _as_matrix(points)
        if self.kind == "ball":
            return bool(np.all(np.einsum("ij,ij->i", pts, pts) <= 1.0 + 1e-12))
        return bool(np.all((pts >= 0.0) & (pts <= 1.0)))

    def _check_n(self, n: int) -> None:
        if self.generators is not None and len(self.generators) != n:
            raise DimensionMismatch(f"{len(self.generators)} generators for dimension {n}")


def ball_spec() -> DistributionSpec:
    return DistributionSpec(kind="ball")


def cube_spec() -> DistributionSpec:
    return DistributionSpec(kind="cube")


def product_spec(generators: Sequence[CoordinateGenerator], variance_floor: float) -> DistributionSpec:
    return DistributionSpec(kind="product", generators=tuple(generators), variance_floor=variance_floor)


@dataclass(frozen=True)
class SampleSet:
    """M points of uniform dimension with their provenance.

    The coordinate matrix is frozen after construction; regenerating with
    the same (dist, seed, M, n) reproduces it bit for bit.
    """

    points: np.ndarray  # (M, n) float64, row per point
    dist: DistributionSpec
    seed: int

    def __post_init__(self):
        pts = _as_matrix(self.points)
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgument("a sample set needs M >= 1 points of dimension n >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("sample contains non-finite coordinates")
        object.__setattr__(self, "points", pts)
        pts.setflags(write=False)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def center(self) -> np.ndarray:
        """Centering point for separation checks: the known center for the
        ball family, the empirical mean otherwise."""
        if self.dist is not None and self.dist.kind == "ball":
            return np.zeros(self.n)
        return self.points.mean(axis=0)


@dataclass(frozen=True)
class LayerGeometry:
    """Spherical layer between two radii plus the cap-covering ball radius."""

    inner_radius: float
    outer_radius: float
    cap_ball_radius: float
    center: np.ndarray

    def __post_init__(self):
        if not (0.0 <= self.inner_radius < self.outer_radius):
            raise InvalidArgument("need 0 <= inner_radius < outer_radius")
        object.__setattr__(self, "center", validate_point(self.center))

    @classmethod
    def for_ball(cls, n: int, r: float) -> "LayerGeometry":
        """Layer between radii r and 1 in the unit ball; the cap cut by a
        tangent hyperplane fits in a ball of radius sqrt(1 - r^2)."""
        if not (0.0 < r < 1.0):
            raise InvalidArgument(f"radius r={r} must lie in (0, 1)")
        return cls(inner_radius=r, outer_radius=1.0,
                   cap_ball_radius=math.sqrt(1.0 - r * r), center=np.zeros(n))

    @classmethod
    def for_cube(cls, center: np.ndarray, r0_squared: float, delta: float) -> "LayerGeometry":
        """Concentration layer (1 +/- delta) R0^2 of a product distribution;
        the covering ball satisfies rho^2 = 2 delta R0^2."""
        if r0_squared <= 0.0:
            raise InvalidArgument("R0^2 must be positive")
        if not (0.0 < delta < 1.0):
            raise InvalidArgument(f"delta={delta} must lie in (0, 1)")
        r0 = math.sqrt(r0_squared)
        return cls(inner_radius=math.sqrt(1.0 - delta) * r0,
                   outer_radius=math.sqrt(1.0 + delta) * r0,
                   cap_ball_radius=math.sqrt(2.0 * delta * r0_squared),
                   center=np.asarray(center, dtype=np.float64))

    def cap_fraction_upper(self, n: int) -> float:
        """Upper estimate of the cap's share of the outer ball: half the
        volume ratio of the covering ball to the outer ball."""
        return 0.5 * (self.cap_ball_radius / self.outer_radius) ** n

    def radial_membership(self, points: np.ndarray) -> np.ndarray:
        pts = _as_matrix(points)
        d = np.linalg.norm(pts - self.center, axis=1)
        return (d >= self.inner_radius) & (d <= self.outer_radius)


def concentration_radius_sq(coordinate_variances: np.ndarray, mean: np.ndarray, center: np.ndarray) -> float:
    """Squared radius of the sphere around ``center`` near which a product
    distribution concentrates: sum of variances plus the squared offset of
    the mean from the center."""
    v = np.asarray(coordinate_variances, dtype=np.float64)
    offset = np.asarray(mean, dtype=np.float64) - np.asarray(center, dtype=np.float64)
    return float(np.sum(v) + np.dot(offset, offset))


# ---------------------------------------------------------------------------
# Counter-based seeding contract
# ---------------------------------------------------------------------------


def derive_key(seed: int, *path: int) -> int:
    """Derive a 128-bit Philox key from a master seed and an integer path.

    Distinct paths give independent streams; the derivation is pure, so
    any worker can reconstruct any stream.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))
    k = ss.generate_state(2, np.uint64)
    return int(k[0]) | (int(k[1]) << 64)


def spawn_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for auxiliary draws (probe choices, error points, ...)."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *path)))


def _blocks_per_point(draws_per_point: int) -> int:
    return -(-draws_per_point // _WORDS_PER_BLOCK)


def _uniform_block(key: int, draws_per_point: int, start: int, count: int) -> np.ndarray:
    """Uniform [0,1) draws for points [start, start+count), shape (count, draws)."""
    bpp = _blocks_per_point(draws_per_point)
    bg = np.random.Philox(key=key)
    if start:
        bg.advance(start * bpp)
    u = np.random.Generator(bg).random((count, bpp * _WORDS_PER_BLOCK))
    return u[:, :draws_per_point]


def _check_nm(n: int, m: int) -> None:
    if n < 1:
        raise InvalidArgument(f"dimension n={n} must be >= 1")
    if m < 1:
        raise InvalidArgument(f"sample size m={m} must be >= 1")


def _ball_points(key: int, n: int, start: int, count: int) -> np.ndarray:
    # Direction from an isotropic Gaussian (inverse-CDF transform keeps the
    # draw count fixed per point), radius with density proportional to r^(n-1).
    u = _uniform_block(key, n + 1, start, count)
    z = ndtri(np.maximum(u[:, :n], 2.0**-54))
    norms = np.linalg.norm(z, axis=1)
    norms[norms == 0.0] = 1.0
    radii = u[:, n] ** (1.0 / n)
    return z * (radii / norms)[:, None]


def _cube_points(key: int, n: int, start: int, count: int) -> np.ndarray:
    return _uniform_block(key, n, start, count)


def _product_points(key: int, spec: DistributionSpec, n: int, start: int, count: int) -> np.ndarray:
    u = _uniform_block(key, n, start, count)
    out = np.empty_like(u)
    for k, g in enumerate(spec.generators):
        out[:, k] = g.transform(u[:, k])
    return out


def sample_ball(n: int, m: int, seed: int, *, start: int = 0, count: int | None = None) -> SampleSet:
    """m i.i.d. points uniform in the unit ball, deterministic per (n, m, seed).

    ``start``/``count`` select a block of the same stream: concatenating
    blocks reproduces the full sample exactly.
    """
    _check_nm(n, m)
    count = m - start if count is None else count
    pts = _ball_points(derive_key(seed), n, start, count)
    return SampleSet(points=pts, dist=ball_spec(), seed=seed)


def sample_cube(n: int, m: int, seed: int, *, start: int = 0, count: int | None = None) -> SampleSet:
    """m i.i.d. points with coordinates uniform on [0, 1]."""
    _check_nm(n, m)
    count = m - start if count is None else count
    pts = _cube_points(derive_key(seed), n, start, count)
    return SampleSet(points=pts, dist=cube_spec(), seed=seed)


def sample_product(spec: DistributionSpec, n: int, m: int, seed: int, *,
                   start: int = 0, count: int | None = None) -> SampleSet:
    """m i.i.d. points from a product distribution on the unit cube."""
    if spec.kind != "product":
        raise InvalidArgument("sample_product needs a product DistributionSpec")
    spec._check_n(n)
    _check_nm(n, m)
    count = m - start if count is None else count
    pts = _product_points(derive_key(seed), spec, n, start, count)
    return SampleSet(points=pts, dist=spec, seed=seed)


def iter_sample_blocks(kind: str, n: int, m: int, seed: int, block: int = 4096,
                       spec: DistributionSpec | None = None) -> Iterator[np.ndarray]:
    """Stream a large sample in blocks without holding all M points."""
    key = derive_key(seed)
    for start in range(0, m, block):
        count = min(block, m - start)
        if kind == "ball":
            yield _ball_points(key, n, start, count)
        elif kind == "cube":
            yield _cube_points(key, n, start, count)
        elif kind == "product":
            yield _product_points(key, spec, n, start, count)
        else:
            raise InvalidArgument(f"unknown distribution kind {kind!r}")


def empirical_mean_and_r0(sample: SampleSet | np.ndarray) -> tuple[np.ndarray, float]:
    """Coordinate-wise mean and R0 = sqrt(sum of coordinate sample variances)."""
    pts = sample.points if isinstance(sample, SampleSet) else _as_matrix(sample)
    m = pts.shape[0]
    if m < 2:
        raise InsufficientData(f"need at least 2 points to estimate variances, got {m}")
    mean = pts.mean(axis=0)
    # Two-pass in row blocks: centered accumulation avoids the cancellation
    # of sum(x^2) - M*mean^2 without materializing a full centered copy.
    acc = np.zeros(pts.shape[1])
    for start in range(0, m, 8192):
        d = pts[start:start + 8192] - mean
        acc += np.einsum("ij,ij->j", d, d)
    r0sq = float(np.sum(acc)) / (m - 1)
    return mean, math.sqrt(r0sq)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def write_csv(sample: SampleSet | np.ndarray, path) -> None:
    """One point per row under a header ``x1,...,xn``."""
    pts = sample.points if isinstance(sample, SampleSet) else _as_matrix(sample)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k + 1}" for k in range(pts.shape[1])])
        for row in pts:
            writer.writerow([f"{v:.17g}" for v in row])


def read_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = len(header)
        if header != [f"x{k + 1}" for k in range(n)]:
            raise InvalidArgument(f"unexpected point-file header {header!r}")
        rows = [[float(v) for v in row] for row in reader if row]
    return np.asarray(rows, dtype=np.float64).reshape(-1, n)


def write_binary(sample: SampleSet | np.ndarray, path) -> None:
    """Magic ``SEPK1``, then n and M as little-endian u64, then the M*n
    coordinates as little-endian IEEE-754 doubles in row-major point order."""
    pts = sample.points if isinstance(sample, SampleSet) else _as_matrix(sample)
    m, n = pts.shape
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<QQ", n, m))
        fh.write(np.ascontiguousarray(pts, dtype="<f8").tobytes())


def read_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(len(BINARY_MAGIC))
        if magic != BINARY_MAGIC:
            raise InvalidArgument(f"bad magic {magic!r}, expected {BINARY_MAGIC!r}")
        n, m = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(8 * n * m), dtype="<f8")
    if data.size != n * m:
        raise InvalidArgument("truncated binary point file")
    return data.reshape(m, n).astype(np.float64)
