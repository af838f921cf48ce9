"""Exception types shared across the package.

The CLI maps each family onto a distinct exit status.
"""


class RidehailError(Exception):
    """Base class for package errors."""


class DomainError(RidehailError, ValueError):
    """An argument lies outside the domain of a function."""


class ConfigError(RidehailError, ValueError):
    """A configuration file or fragment is malformed."""


class RegimeError(RidehailError):
    """An operation was requested outside the parameter regime where it is defined."""


class NumericalError(RidehailError, ArithmeticError):
    """A numerical routine failed to meet its guarantees."""


class TruncationError(NumericalError):
    """A truncated state space discards more mass than allowed.

    ``tail_estimate`` carries the estimated omitted probability mass.
    """

    def __init__(self, message, tail_estimate):
        super().__init__(message)
        self.tail_estimate = tail_estimate


class MonotonicityError(NumericalError):
    """A function expected to be monotone was observed not to be."""
