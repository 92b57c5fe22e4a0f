"""Exception types shared across the package."""


class SpinelawError(Exception):
    """Base class for all package errors."""


class InvalidModel(SpinelawError):
    """A model ingredient violates one of its invariants."""


class PathDomainError(SpinelawError):
    """A path query or integral falls outside the path's time domain."""


class QueryOutOfRange(SpinelawError):
    """A tree query refers to a time outside [0, horizon]."""


class TruncatedTree(SpinelawError):
    """The tree hit its particle cap before the queried time."""


class NotAlive(SpinelawError):
    """The referenced particle is not alive at the queried time."""


class ExtinctionAtT(SpinelawError):
    """The population is empty at the queried time, so the weighted sum is undefined."""


class ConfigError(SpinelawError):
    """A run configuration is missing, malformed, or inconsistent."""


class InsufficientData(SpinelawError):
    """Too few values to form the requested statistic."""


class ModelWarning(UserWarning):
    """Non-fatal model diagnostics, e.g. a tilt strong enough to kill the martingale limit."""
