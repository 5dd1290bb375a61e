"""Exception types shared across the package."""


class DegenerateDataError(ValueError):
    """Raised when data cannot support the requested computation (e.g. all points identical)."""


class DimensionMismatchError(ValueError):
    """Raised when point sets of different dimension are combined."""


class InternalConsistencyError(RuntimeError):
    """Raised when a quantity violates an invariant that should hold up to round-off."""


class GramFactorizationError(RuntimeError):
    """Raised when a Gram matrix cannot be Cholesky-factorized even after jitter escalation."""


class OptimizationError(RuntimeError):
    """Raised when a stochastic-gradient fit produces non-finite values."""


class SolverError(RuntimeError):
    """Raised when the conic solver cannot produce a solution at the requested accuracy.

    Carries the best residuals seen so the caller can report or retry.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class ConstraintViolationError(ValueError):
    """Raised when a decision vector violates its problem's constraints."""


class ConfigError(ValueError):
    """Raised for invalid configuration values."""
