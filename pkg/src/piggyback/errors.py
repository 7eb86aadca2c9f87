"""Exception hierarchy shared by all modules.

ParameterError covers invalid code parameters and malformed arguments.
DataError covers anything wrong with the symbols themselves (missing,
inconsistent, undecodable). UnsupportedPatternError is raised when a
failure pattern is outside what the code guarantees to recover.
"""


class PiggybackError(Exception):
    """Base class for all library errors."""


class ParameterError(PiggybackError, ValueError):
    """Invalid code parameters or arguments."""


class DataError(PiggybackError):
    """Symbol data is missing, inconsistent or undecodable."""


class InsufficientDataError(DataError):
    """Fewer symbols supplied than the code needs to decode."""


class DecodeError(DataError):
    """A decode system turned out singular or inconsistent."""


class RepairError(DataError):
    """A repair could not read a cell it needs."""


class UnsupportedPatternError(PiggybackError):
    """Failure pattern outside the code's guaranteed recovery capability."""
