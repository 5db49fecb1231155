"""Exception hierarchy.

The CLI maps these onto exit codes: DataError -> 1, ConfigError (and
subclasses) -> 2, NumericError -> 3.
"""


class FuzzygradError(Exception):
    """Base class for all package errors."""


class DataError(FuzzygradError):
    """Dataset files that are missing, empty or unparseable."""


class ConfigError(FuzzygradError):
    """Invalid model/training configuration or mismatched artifacts."""


class CapacityError(ConfigError):
    """Rule count exceeds what the enumeration reducer can hold."""


class InsufficientDataError(ConfigError):
    """Fewer training rows than the operation needs."""


class DimensionError(FuzzygradError, ValueError):
    """Array arguments whose shapes do not agree."""


class NumericError(FuzzygradError):
    """Non-finite values or a reducer that failed to converge."""


class ParameterError(NumericError):
    """Raw parameter tensors containing non-finite entries."""
