"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError (and
subclasses) -> 3, NumericalError -> 4.
"""


class DcaKitError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DcaKitError):
    """Invalid configuration: bad flag value, inconsistent settings."""


class DataError(DcaKitError):
    """Input data cannot be processed as requested."""


class ParseError(DataError):
    """A CSV cell or row could not be parsed; message carries the line number."""


class SchemaError(DataError):
    """Structural problem with an input file (header, emptiness, ordering)."""


class DegenerateColumnError(DataError):
    """A column is constant and carries no information."""


class InsufficientDataError(DataError):
    """Too few values for the requested statistic or operation."""


class DetectionError(DataError):
    """Segment boundary detection found fewer peaks than required."""


class NumericalError(DcaKitError):
    """A numerical routine failed to converge."""
