"""Closed-form lower bounds on separation-event probabilities.

Every bound is evaluated in log-space: the complement (one minus the
bound) is assembled as a sum of exponentials of log-terms, so parameters
like n = 5000 or M = 7e16, where r^n underflows doubles, stay exact to
machine precision.  A bound whose right-hand side drops to zero or below
is reported as vacuous, never as an error: it is a true statement that
carries no information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgument, NoFeasibleM

_INT64_MAX = 2**63 - 1
_LOG_HALF = math.log(0.5)


def _log1mexp(log_x: float) -> float:
    """log(1 - exp(log_x)) for log_x < 0, stable near both ends."""
    if log_x >= 0.0:
        raise ValueError("log1mexp needs a negative argument")
    if log_x > -math.log(2.0):
        return math.log(-math.expm1(log_x))
    return math.log1p(-math.exp(log_x))


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _log_m(m: float) -> float:
    return math.log(m) if m > 0.0 else -math.inf


@dataclass(frozen=True)
class BoundResult:
    """A probability lower bound and the log of its complement.

    ``probability_lower_bound`` is clamped to [0, 1]; ``vacuous`` is set
    exactly when the raw bound is <= 0 (complement >= 1).
    """

    log_complement: float
    probability_lower_bound: float
    vacuous: bool

    @classmethod
    def from_log_complement(cls, log_complement: float) -> "BoundResult":
        p = max(0.0, -math.expm1(log_complement)) if log_complement < 0.0 else 0.0
        return cls(log_complement=log_complement,
                   probability_lower_bound=p,
                   vacuous=log_complement >= 0.0)


@dataclass(frozen=True)
class MaxM:
    """A maximal admissible set size: real value plus saturating integer floor."""

    value: float
    floor: int

    @classmethod
    def from_value(cls, value: float) -> "MaxM":
        if math.isinf(value) or value >= _INT64_MAX:
            return cls(value=value, floor=_INT64_MAX)
        return cls(value=value, floor=max(0, math.floor(value)))


@dataclass(frozen=True)
class BallBoundParams:
    """Unit-ball bound parameters: dimension n, set size M (a real; the
    interesting regimes exceed 2^63), and radial threshold r in (0, 1).

    rho = sqrt(1 - r^2) is derived, never stored."""

    n: int
    m: float
    r: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument(f"n={self.n} must be >= 1")
        if self.m < 1:
            raise InvalidArgument(f"M={self.m} must be >= 1")
        if not (0.0 < self.r < 1.0):
            raise InvalidArgument(f"r={self.r} must lie in (0, 1)")

    @property
    def rho(self) -> float:
        return math.sqrt(1.0 - self.r * self.r)

    @property
    def log_r(self) -> float:
        return math.log(self.r)

    @property
    def log_rho(self) -> float:
        # 0.5*log1p(-r^2) loses nothing for r near 1, unlike log(sqrt(...)).
        return 0.5 * math.log1p(-self.r * self.r)

    @property
    def log_m(self) -> float:
        return _log_m(self.m)


@dataclass(frozen=True)
class CubeBoundParams:
    """Product-distribution bound parameters.

    delta is the relative layer half-width (0 < delta < 2/3), sigma0sq the
    variance floor, r0sq the sum of coordinate variances.  The Hoeffding
    deviation scale t = delta * R0^2 / n is derived."""

    n: int
    m: float
    delta: float
    sigma0sq: float
    r0sq: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument(f"n={self.n} must be >= 1")
        if self.m < 0:
            raise InvalidArgument(f"M={self.m} must be >= 0")
        if not (0.0 < self.delta < 2.0 / 3.0):
            raise InvalidArgument(f"delta={self.delta} must lie in (0, 2/3)")
        if not (0.0 < self.sigma0sq <= 0.25):
            raise InvalidArgument(f"sigma0^2={self.sigma0sq} must lie in (0, 1/4]")
        if self.r0sq is None:
            object.__setattr__(self, "r0sq", self.n * self.sigma0sq)
        if not (self.n * self.sigma0sq <= self.r0sq * (1 + 1e-12) and self.r0sq <= self.n):
            raise InvalidArgument(
                f"R0^2={self.r0sq} must lie in [n*sigma0^2, n] = [{self.n * self.sigma0sq}, {self.n}]"
            )

    @property
    def t(self) -> float:
        return self.delta * self.r0sq / self.n

    @property
    def log_m(self) -> float:
        return _log_m(self.m)


# ---------------------------------------------------------------------------
# Unit-ball bounds
# ---------------------------------------------------------------------------


def ball_single(params: BallBoundParams) -> BoundResult:
    """One marked point separable from the other M-1 by its radial hyperplane:
    bound 1 - r^n - 0.5 (M-1) rho^n."""
    n, m = params.n, params.m
    t1 = n * params.log_r
    t2 = _LOG_HALF + _log_m(m - 1.0) + n * params.log_rho
    return BoundResult.from_log_complement(_logaddexp(t1, t2))


def ball_pairwise(params: BallBoundParams) -> BoundResult:
    """Every point separable from every other (all ordered pairs):
    bound 1 - M r^n - 0.5 M (M-1) rho^n."""
    n, m = params.n, params.m
    t1 = params.log_m + n * params.log_r
    t2 = _LOG_HALF + params.log_m + _log_m(m - 1.0) + n * params.log_rho
    return BoundResult.from_log_complement(_logaddexp(t1, t2))


def ball_angle(params: BallBoundParams) -> BoundResult:
    """Pairwise cosines all below r: bound 1 - M r^n - M (M-1) rho^n."""
    n, m = params.n, params.m
    t1 = params.log_m + n * params.log_r
    t2 = params.log_m + _log_m(m - 1.0) + n * params.log_rho
    return BoundResult.from_log_complement(_logaddexp(t1, t2))


def ball_max_m_single(n: int, r: float, theta: float) -> MaxM:
    """Largest M keeping the single-point failure under theta:
    M < 2 (theta - r^n) / rho^n."""
    p = BallBoundParams(n=n, m=1.0, r=r)
    if not (0.0 < theta < 1.0):
        raise InvalidArgument(f"theta={theta} must lie in (0, 1)")
    gap = theta - math.exp(n * p.log_r)
    if gap < 0.0:
        raise NoFeasibleM(f"theta={theta} < r^n; no set size satisfies the bound")
    if gap == 0.0:
        return MaxM(value=0.0, floor=0)
    log_value = math.log(2.0) + math.log(gap) - n * p.log_rho
    return MaxM.from_value(math.exp(log_value) if log_value < 709.0 else math.inf)


def ball_max_m_pairwise(n: int, r: float, theta: float) -> MaxM:
    """Largest M keeping the all-pairs failure under theta:
    M < (r/rho)^n (sqrt(1 + 2 theta rho^n / r^(2n)) - 1)."""
    p = BallBoundParams(n=n, m=1.0, r=r)
    if not (0.0 < theta < 1.0):
        raise InvalidArgument(f"theta={theta} must lie in (0, 1)")
    log_b = math.log(2.0 * theta) + n * p.log_rho - 2.0 * n * p.log_r
    if log_b > 50.0:          # sqrt(1+B) - 1 ~ sqrt(B) to machine precision
        log_term = 0.5 * log_b
    elif log_b < -50.0:       # sqrt(1+B) - 1 ~ B/2
        log_term = log_b - math.log(2.0)
    else:
        log_term = math.log(math.expm1(0.5 * math.log1p(math.exp(log_b))))
    log_value = n * (p.log_r - p.log_rho) + log_term
    return MaxM.from_value(math.exp(log_value) if log_value < 709.0 else math.inf)


def ball_max_m_simple(n: int, r: float, theta: float) -> MaxM:
    """Simpler sufficient condition theta / M^2 > r^n + 0.5 rho^n, i.e.
    M < sqrt(theta / (r^n + 0.5 rho^n)).  Weaker than the pairwise estimate
    whenever it admits at least one point."""
    p = BallBoundParams(n=n, m=1.0, r=r)
    if not (0.0 < theta < 1.0):
        raise InvalidArgument(f"theta={theta} must lie in (0, 1)")
    log_den = _logaddexp(n * p.log_r, _LOG_HALF + n * p.log_rho)
    log_value = 0.5 * (math.log(theta) - log_den)
    return MaxM.from_value(math.exp(log_value) if log_value < 709.0 else math.inf)


# ---------------------------------------------------------------------------
# Hoeffding tail and cube bounds
# ---------------------------------------------------------------------------


def hoeffding(n: int, t: float, two_sided: bool = False) -> float:
    """Tail bound exp(-2 n t^2) for the mean of n independent [0,1]
    variables (doubled for the two-sided event), clamped to [0, 1]."""
    if n < 1:
        raise InvalidArgument(f"n={n} must be >= 1")
    if t < 0.0:
        raise InvalidArgument(f"t={t} must be >= 0")
    log_tail = -2.0 * n * t * t + (math.log(2.0) if two_sided else 0.0)
    return min(1.0, math.exp(log_tail))


def cube_layer_probability(params: CubeBoundParams) -> float:
    """Lower bound on the chance a product-distributed point lands in the
    relative layer (1 +/- delta) R0^2, via the two-sided Hoeffding tail at
    t = delta R0^2 / n; clamped to [0, 1]."""
    tail = hoeffding(params.n, params.t, two_sided=True)
    return max(0.0, 1.0 - tail)


def _cube_exponents(params: CubeBoundParams) -> tuple[float, float]:
    n = params.n
    e_layer = -2.0 * params.delta**2 * params.r0sq**2 / n
    e_cap = -2.0 * params.r0sq**2 * (2.0 - 3.0 * params.delta) ** 2 / n
    return e_layer, e_cap


def cube_single(params: CubeBoundParams) -> BoundResult:
    """One marked point separable under a product distribution:
    bound 1 - 2 M exp(-2 delta^2 R0^4 / n) - M exp(-2 R0^4 (2-3 delta)^2 / n).

    At delta = 1/2 and R0^2 = n sigma0^2 this reduces exactly to the
    simplified form 1 - 3 M exp(-0.5 n sigma0^4)."""
    e_layer, e_cap = _cube_exponents(params)
    t1 = math.log(2.0) + params.log_m + e_layer
    t2 = params.log_m + e_cap
    return BoundResult.from_log_complement(_logaddexp(t1, t2))


def cube_pairwise(params: CubeBoundParams) -> BoundResult:
    """All pairs separable under a product distribution:
    bound 1 - 2 M exp(-2 delta^2 R0^4 / n) - M (M-1) exp(-2 R0^4 (2-3 delta)^2 / n)."""
    e_layer, e_cap = _cube_exponents(params)
    t1 = math.log(2.0) + params.log_m + e_layer
    t2 = params.log_m + _log_m(params.m - 1.0) + e_cap
    return BoundResult.from_log_complement(_logaddexp(t1, t2))


def cube_single_simplified(n: int, m: float, sigma0sq: float) -> BoundResult:
    """Specialized single-point estimate 1 - 3 M exp(-0.5 n sigma0^4)."""
    if m < 0:
        raise InvalidArgument(f"M={m} must be >= 0")
    lc = math.log(3.0) + _log_m(m) - 0.5 * n * sigma0sq**2
    return BoundResult.from_log_complement(lc)


def cube_pairwise_simplified(n: int, m: float, sigma0sq: float) -> BoundResult:
    """Specialized all-pairs estimate 1 - M (M+1) exp(-0.5 n sigma0^4)."""
    if m < 0:
        raise InvalidArgument(f"M={m} must be >= 0")
    lc = _log_m(m) + _log_m(m + 1.0) - 0.5 * n * sigma0sq**2
    return BoundResult.from_log_complement(lc)


def cube_max_m_single(n: int, sigma0sq: float, theta: float) -> MaxM:
    """Largest M for the simplified single-point estimate:
    M < (theta/3) exp(0.5 n sigma0^4)."""
    if not (0.0 < theta < 1.0):
        raise InvalidArgument(f"theta={theta} must lie in (0, 1)")
    if not (0.0 < sigma0sq <= 0.25):
        raise InvalidArgument(f"sigma0^2={sigma0sq} must lie in (0, 1/4]")
    log_value = math.log(theta / 3.0) + 0.5 * n * sigma0sq**2
    return MaxM.from_value(math.exp(log_value) if log_value < 709.0 else math.inf)


def cube_max_m_pairwise(n: int, sigma0sq: float, theta: float) -> MaxM:
    """Largest M for the simplified all-pairs estimate:
    (M+1)^2 < (theta/3) exp(0.5 n sigma0^4)."""
    if not (0.0 < theta < 1.0):
        raise InvalidArgument(f"theta={theta} must lie in (0, 1)")
    if not (0.0 < sigma0sq <= 0.25):
        raise InvalidArgument(f"sigma0^2={sigma0sq} must lie in (0, 1/4]")
    half_log = 0.5 * (math.log(theta / 3.0) + 0.5 * n * sigma0sq**2)
    value = math.exp(half_log) - 1.0 if half_log < 709.0 else math.inf
    return MaxM.from_value(value)


# ---------------------------------------------------------------------------
# Two-hyperplane cascade bound
# ---------------------------------------------------------------------------


def cascade_bound(n: int, r: float, m: float) -> BoundResult:
    """Probability that a marked ball point is separable from all but at
    most n-1 others by its radial hyperplane (the leftovers are then
    handled by one orthogonal hyperplane):

        (1 - r^n) (1 - 0.5 rho^n)^(M-1)
        * (1 - lambda^n / n!) * exp(lambda),
        lambda = 0.5 (M - n) rho^n / (1 - 0.5 rho^n).

    Requires M > n.  Evaluated entirely in log-space with log-gamma for n!.
    """
    params = BallBoundParams(n=n, m=max(m, 1.0), r=r)
    if m <= n:
        raise InvalidArgument(f"cascade bound needs M > n, got M={m}, n={n}")
    log_x = _LOG_HALF + n * params.log_rho        # x = 0.5 rho^n
    x = math.exp(log_x)
    lam = (m - n) * x / (1.0 - x)
    log_rn = n * params.log_r

    log_p = math.log1p(-math.exp(log_rn)) if log_rn < 0 else -math.inf
    log_p += (m - 1.0) * math.log1p(-x)
    log_p += lam

    log_tail = n * math.log(lam) - math.lgamma(n + 1.0) if lam > 0.0 else -math.inf
    if log_tail >= 0.0:
        # Factorial factor <= 0: the raw bound is non-positive.  Report the
        # exact complement 1 - bound = 1 + |bound| so clamping is honest.
        log_abs_factor = log_tail + _log1mexp(-log_tail) if log_tail > 0.0 else -math.inf
        log_abs_bound = log_p + log_abs_factor
        return BoundResult.from_log_complement(_logaddexp(0.0, log_abs_bound))
    log_p += _log1mexp(log_tail)
    log_p = min(log_p, 0.0)
    if log_p == 0.0:
        return BoundResult(log_complement=-math.inf, probability_lower_bound=1.0, vacuous=False)
    return BoundResult.from_log_complement(_log1mexp(log_p))
