"""Exception types shared across the package."""


class QuasipercError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QuasipercError, ValueError):
    pass


class ResourceLimitError(QuasipercError):
    """A requested size exceeds a configured memory/compute cap."""


class AccuracyError(QuasipercError, ArithmeticError):
    """A numerical backend could not meet its error bound."""


class ConfigError(QuasipercError, ValueError):
    """Malformed, unknown, or out-of-range configuration entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
