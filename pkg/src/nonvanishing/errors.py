"""Exception types shared across the package."""


class NonvanishingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NonvanishingError, ValueError):
    """An argument lies outside the domain of the requested function."""


class BudgetExceeded(NonvanishingError):
    """A computation would exceed the configured size or memory budget."""


class ConvergenceError(NonvanishingError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` carries the best value obtained, ``error`` the achieved
    error estimate.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
