class MacError(Exception):
    """Base class for package errors."""


class UsageError(MacError, ValueError):
    """Bad arguments: wrong shapes, negative times, mismatched grids."""


class NumericalFailure(MacError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""

    def __init__(self, message: str, residual: float | None = None, step: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.step = step


class InvariantViolation(MacError):
    """A property that must hold for the scheme was observed to fail."""
