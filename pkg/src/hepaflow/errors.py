"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class HepaflowError(Exception):
    """Base class for all package errors."""


class ConfigError(HepaflowError):
    """Invalid configuration: unknown keys, bad values, bad CLI arguments."""


class DataError(HepaflowError):
    """Malformed input data: schema mismatches, bad cells, bad labels."""


class NumericError(HepaflowError):
    """Numerical failure: singular systems, infeasible searches, NaN inputs."""
