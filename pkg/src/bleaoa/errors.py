"""Exception types shared across the toolkit.

All three subclass ValueError so generic callers can catch broadly; the CLI
maps each class to a distinct exit code.
"""


class ConfigError(ValueError):
    """A configuration value violates an invariant."""


class FormatError(ValueError):
    """A file being parsed does not match its declared format."""


class DegenerateInputError(ValueError):
    """The input carries no usable signal (cancelled vectors, flat objective)."""
