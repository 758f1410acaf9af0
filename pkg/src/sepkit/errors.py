"""Exception types shared across the toolkit."""


class SepkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(SepkitError, ValueError):
    """A parameter is outside its documented range."""


class InsufficientData(SepkitError):
    """An estimator was given fewer samples than it needs."""


class DimensionMismatch(SepkitError):
    """Operands have incompatible dimensions."""


class NoFeasibleM(SepkitError):
    """No positive set size satisfies the requested confidence level."""


class DegenerateProbe(SepkitError):
    """The probe point coincides with the sample mean (zero weight vector)."""


class DegeneratePoint(SepkitError):
    """A point has zero norm where a direction is required."""


class SingularCovariance(SepkitError):
    """The empirical covariance is singular and regularization is forbidden."""


class OracleTooLarge(SepkitError):
    """Instance exceeds the exact oracle's size limits."""


class TooManyViolators(SepkitError):
    """More cone violators than a single extra hyperplane can absorb."""


class ProbeNotInLayer(SepkitError):
    """The probe's norm does not exceed the radial threshold."""


class NotSeparable(SepkitError):
    """The error point cannot be split from the correct set by a threshold."""

    def __init__(self, message: str, margin: float = float("nan")):
        super().__init__(message)
        self.margin = margin


class CascadeConstructionError(SepkitError):
    """The two-hyperplane construction failed on a degenerate instance."""


class ResourceBudgetExceeded(SepkitError):
    """Projected work exceeds the configured budget."""
