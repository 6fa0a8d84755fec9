class FFQLError(Exception):
    """Base class for errors raised by ffql."""


class DomainError(FFQLError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(FFQLError, ValueError):
    """Invalid run configuration (bad q, unreadable file, ...)."""


class DegenerateSchedule(FFQLError):
    """Paper-mode mollifier schedule has an empty index set at this X."""


class OracleMismatch(FFQLError):
    """Two independent computations of the same quantity disagree."""


class RootFindingError(FFQLError):
    """Companion-matrix roots failed the backward-error check."""
