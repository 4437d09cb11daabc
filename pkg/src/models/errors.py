"""Exception hierarchy shared by every layer of the lab."""


class SkydeError(Exception):
    """Base class for all errors raised by the lab."""


class RejectedInputError(SkydeError, ValueError):
    """An argument violates an operation's precondition."""


class MalformedMessageError(SkydeError, ValueError):
    """A datagram is too short to hold a SoM header and payload."""


class UndefinedStatisticError(SkydeError, ArithmeticError):
    """A statistic was requested over an empty or degenerate sample."""


class MonotonicityError(SkydeError, ValueError):
    """Timestamps fed to a stateful estimator went backwards."""


class IntegrityConflictError(SkydeError):
    """Two chunks claim the same sequence number with different data."""


class ConfigError(SkydeError, ValueError):
    """A scenario configuration is invalid."""
