"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the physical domain of an operation."""


class ClassificationError(ValueError):
    """Far-field/boundary data do not admit the requested wave configuration."""


class ConfigError(ValueError):
    """A run configuration is malformed or violates a precondition."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge; treated as a bug signal."""


class PositivityError(RuntimeError):
    """A density became non-positive during time stepping."""

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot


class FitError(ValueError):
    """A decay-rate fit was requested on unusable data."""
