"""Exception hierarchy shared by every chemotax module."""


class ChemotaxError(Exception):
    """Base class for all package errors."""


class MissingKinetics(ChemotaxError):
    pass


class NonFinite(ChemotaxError):
    pass


class EmptyWindow(ChemotaxError):
    pass


class NotWellMixedStable(ChemotaxError):
    pass


class UnsupportedBoundary(ChemotaxError):
    pass


class NonPositiveChi(ChemotaxError):
    pass


class ConfigError(ChemotaxError):
    """Raised for malformed configuration files; ``key`` names the offender."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class UnknownKey(ConfigError):
    pass
