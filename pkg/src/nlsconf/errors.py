"""Exception hierarchy shared by every module."""


class NlsError(Exception):
    """Base class for all package errors."""


class ConfigurationError(NlsError, ValueError):
    """Bad grid, config document or mismatched inputs."""


class ParameterError(NlsError, ValueError):
    """A parameter outside the admissible set of a family or transform."""


class DomainError(NlsError, ValueError):
    """Evaluation at a time (or point) where a map or coefficient is singular."""


class BalanceError(DomainError):
    """Leading-order balance F*u0*v0 = -2 cannot be formed (F or u0 vanish)."""


class DivergenceError(NlsError, ArithmeticError):
    def __init__(self, time: float, message: str = ""):
        self.time = time
        super().__init__(message or f"non-finite values at t={time!r}")


class NumericalError(NlsError, ArithmeticError):
    """A numerical routine (quadrature, root finding) did not converge."""


class AccuracyWarning(UserWarning):
    """Result computed, but its accuracy is not guaranteed."""
