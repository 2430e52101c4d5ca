"""Exception types shared across the package."""


class AndersonEntError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(AndersonEntError, ValueError):
    """Invalid configuration or parameter value."""


class DimensionError(AndersonEntError, ValueError):
    """Vector or index does not match the lattice size."""


class DataError(AndersonEntError, ValueError):
    """Input data is degenerate or otherwise unusable for a fit."""


class InsufficientDataError(DataError):
    """Too few usable points for the requested analysis."""


class ExtendedStateError(AndersonEntError):
    """No spatial decay: the log-amplitude regression slope is >= 0."""


class ConvergenceError(AndersonEntError, RuntimeError):
    """An iterative method hit its cap before reaching tolerance."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class NumericalError(AndersonEntError, RuntimeError):
    """Linear-algebra breakdown or an unrecoverable numeric failure."""
