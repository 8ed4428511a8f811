"""Exception types shared across the package."""


class LevsqueezeError(Exception):
    """Base class for all package errors."""


class ConfigError(LevsqueezeError):
    """Invalid user input or configuration (CLI exit code 2)."""


class NumericalFailure(LevsqueezeError):
    """A numerical evaluation produced an unusable result (CLI exit code 3)."""
