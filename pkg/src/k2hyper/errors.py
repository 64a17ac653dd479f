"""Exception and warning types shared across the package."""


class K2Error(Exception):
    """Base class for errors raised by k2hyper."""


class PoleError(K2Error, ArithmeticError):
    """A denominator Pochhammer factor vanished while its numerator did not."""


class DomainError(K2Error, ValueError):
    """Evaluation requested outside the region where it is defined."""


class InconclusiveError(K2Error):
    """No candidate form of an identity converged stably."""

    def __init__(self, message, reports=None):
        super().__init__(message)
        self.reports = reports or []


class DivergenceWarning(RuntimeWarning):
    """Series shells are not decaying; the truncated value is unreliable."""
