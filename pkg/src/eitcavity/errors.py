"""Exception types raised across the package."""


class EitCavityError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(EitCavityError, ValueError):
    """Invalid run configuration or parameter record."""

    exit_code = 2

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class SingularParametersError(EitCavityError, ArithmeticError):
    """A denominator or matrix is singular at the requested parameters."""

    exit_code = 3


class IntegrationDivergedError(EitCavityError, FloatingPointError):
    """Stochastic integration blew up; retry with a smaller time step."""

    exit_code = 4


class EmptyCurveError(EitCavityError, ValueError):
    """A curve has no finite samples to analyse."""

    exit_code = 1


class LowExcitationWarning(UserWarning):
    """Mean excitation is not small compared with the atom number."""
