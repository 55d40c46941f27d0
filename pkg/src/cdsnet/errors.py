"""Exception types shared across the package."""


class CdsnetError(Exception):
    """Base class for all package-specific errors."""


class NotFound(CdsnetError):
    """Requested built-in scenario does not exist."""


class ParseError(CdsnetError):
    """Scenario document violates the configuration schema.

    The message carries the path of the offending field, e.g.
    ``pair_stats[2].mean``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(CdsnetError):
    """A structurally valid document violates a model invariant."""


class DomainError(CdsnetError):
    """Numeric argument outside its admissible range."""


class ConfigError(CdsnetError):
    """Inconsistent network sampling configuration (e.g. C >= N)."""


class EmptyInput(CdsnetError):
    """Operation applied to an empty report."""
