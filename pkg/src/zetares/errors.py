"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when a parameter vector or configuration violates an invariant."""


class EvaluationError(RuntimeError):
    """Raised when a numerical routine cannot meet its accuracy contract."""
