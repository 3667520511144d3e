class DreamError(Exception):
    """Base class for errors raised by dreamtest."""


class InvalidArgumentError(DreamError, ValueError):
    pass


class SingularCovarianceError(DreamError, ArithmeticError):
    """Sample covariance is singular or too ill-conditioned to invert."""


class DegenerateVarianceError(DreamError, ArithmeticError):
    """Variance estimate is zero, e.g. because every residual vanished."""


class ConfigError(DreamError, ValueError):
    """Inconsistent user configuration (CLI exit code 2)."""


class DataError(DreamError, ValueError):
    """Unreadable or malformed input data (CLI exit code 3)."""
