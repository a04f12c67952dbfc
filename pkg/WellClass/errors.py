"""
Exceptions raised by `WellClass`.

The command line interface maps each subclass of `WellClassError` to a
process exit code (see ``WellClass.cli``).

"""

class WellClassError(Exception):
    """
    Base class of all WellClass errors.

    """
    pass

class ConfigError(WellClassError, ValueError):
    """
    Invalid configuration value. The message names the offending field.

    """
    pass

class DataError(WellClassError, ValueError):
    """
    Input data with wrong shape, contents, or missing files.

    """
    pass

class TrainingError(WellClassError, RuntimeError):
    """
    Model fitting failed (no convergence, non-finite loss, divergence).

    """
    pass
