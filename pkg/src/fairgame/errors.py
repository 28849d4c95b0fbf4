"""Exception types raised across the package."""


class FairGameError(Exception):
    """Base class for all package errors."""


class ConfigurationError(FairGameError, KeyError):
    """Unknown (effort, group) cell or an invalid configuration value."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class UndefinedRatioError(FairGameError, ValueError):
    """Both densities vanish at the requested score."""


class EstimationError(FairGameError, ValueError):
    """Not enough data to estimate a density."""


class InfeasibleTargetError(FairGameError, ValueError):
    """An operating point lies outside a feasible ROC region."""


class DataFormatError(FairGameError, ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(FairGameError, ArithmeticError):
    """A linear system could not be solved."""
