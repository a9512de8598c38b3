"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class ReuploadError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(ReuploadError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(InvalidArgumentError):
    """Input is well-typed but carries no usable information (e.g. all zeros)."""


class UnsupportedError(InvalidArgumentError):
    """The operation is not defined for this configuration."""


class ConfigError(InvalidArgumentError):
    """Invalid experiment/noise configuration; ``field`` is the dotted key path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class TrainingFailure(ReuploadError, RuntimeError):
    """Optimisation produced a non-finite loss.

    ``theta`` holds the last parameter set whose loss was finite (or None).
    """

    def __init__(self, message: str, theta=None, partial=None):
        super().__init__(message)
        self.theta = theta
        self.partial = partial
