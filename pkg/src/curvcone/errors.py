"""Exception hierarchy shared by all modules."""


class CurvconeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(CurvconeError, ValueError):
    """Non-finite, asymmetric or otherwise malformed numeric input."""


class DimensionMismatch(CurvconeError, ValueError):
    pass


class MetricNotSPD(CurvconeError, ValueError):
    """The metric failed symmetric positive-definite factorization."""


class DimensionTooSmall(CurvconeError, ValueError):
    pass


class DegenerateParameter(CurvconeError, ValueError):
    pass


class DegeneratePlane(CurvconeError, ValueError):
    """The two vectors spanning a sectional plane are (nearly) dependent."""


class NoBoundaryFound(CurvconeError, RuntimeError):
    pass


class ExponentOverflow(CurvconeError, OverflowError):
    """``N * max(v)`` exceeds the safe range for ``exp(N v)``."""


class NotLocallyConformallyFlat(CurvconeError, ValueError):
    pass


class InternalInconsistency(CurvconeError, AssertionError):
    pass


class ConfigError(CurvconeError, ValueError):
    """Malformed experiment configuration (CLI exit status 2)."""
