"""Exception hierarchy shared by all tempcorr modules."""


class TempcorrError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(TempcorrError, ValueError):
    """Operand shapes or subsystem dimensions do not fit together."""


class CapacityError(TempcorrError, ValueError):
    """A requested object would exceed a configured size cap."""


class ConvergenceError(TempcorrError, ArithmeticError):
    """An iterative routine hit its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverError(TempcorrError, ArithmeticError):
    """The conic solver failed numerically or returned a non-optimal status."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class ConfigError(TempcorrError, ValueError):
    """Invalid experiment configuration or CLI arguments."""
