"""Exception hierarchy used across the package.

Every error raised deliberately by this package derives from ImaError, so
callers can catch one type at the boundary.  The subclasses mirror the
failure modes of the statistical machinery rather than Python mechanics.
"""


class ImaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTimes(ImaError):
    """Observation times are not strictly increasing or not finite."""


class InvalidParameter(ImaError):
    """A model or configuration parameter is outside its domain."""


class InvalidGap(ImaError):
    """A time gap below the unit minimum was requested."""


class InvalidInput(ImaError):
    """Array shapes, lengths, or values do not form a usable input."""


class NotPositiveDefinite(ImaError):
    """A covariance is not positive definite for the requested inputs."""


class DegenerateData(ImaError):
    """The data admit no meaningful fit (constant series, zero variance)."""


class InsufficientData(ImaError):
    """Too few observations for the requested operation."""


class NumericalFailure(ImaError):
    """An objective or recursion produced a non-finite value."""


class SeUnavailable(ImaError):
    """Standard errors could not be derived from the curvature."""


class BootstrapUnstable(ImaError):
    """Too many bootstrap replicates failed to refit."""


class McUnstable(ImaError):
    """Too many Monte Carlo replicates failed."""


class CsvParseError(ImaError):
    """A CSV input failed to parse; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
