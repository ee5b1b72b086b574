"""Exception hierarchy shared by all numerical modules."""


class EisensupError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EisensupError, ValueError):
    """Input lies outside the domain of the requested function."""


class PoleError(DomainError):
    """Input sits on (or numerically at) a pole."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class ConditioningError(EisensupError, ArithmeticError):
    """Result would be dominated by cancellation, e.g. near a zero of zeta."""

    def __init__(self, message, magnitude=None):
        super().__init__(message)
        self.magnitude = magnitude


class AccuracyError(EisensupError, ArithmeticError):
    """Requested tolerance could not be met with the available resources."""

    def __init__(self, message, achieved=None, suggestion=None):
        super().__init__(message)
        self.achieved = achieved
        self.suggestion = suggestion


class ConfigError(EisensupError, ValueError):
    """Malformed or inconsistent run configuration."""
