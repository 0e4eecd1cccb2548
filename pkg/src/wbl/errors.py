"""Exception hierarchy shared across the package."""


class WblError(Exception):
    """Base class for all package-specific errors."""


class DomainError(WblError, ValueError):
    """An input violates a mathematical precondition (cone membership,
    commutation, admissible parameter range, ...)."""


class NumericalError(WblError, ArithmeticError):
    """A numerical routine failed (non-convergent eigensolver, overflow)."""


class ConvergenceError(NumericalError):
    """A truncated series did not reach the requested tolerance.

    Carries the last relative truncation estimate in ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SingularPathError(WblError):
    """A simulated path became numerically singular where an operation
    requires strictly positive-definite states."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class RegimeError(WblError, ValueError):
    """The requested parameter regime is outside what the method supports."""
