"""Exact solutions, conformal maps and integrability checks for the 1+1D cubic NLS
with variable coefficients, backed by a split-step spectral integrator."""

from .errors import (
    AccuracyWarning,
    BalanceError,
    ConfigurationError,
    DivergenceError,
    DomainError,
    NlsError,
    NumericalError,
    ParameterError,
)
from .field import ComplexField, Grid1D, Spectrum, make_grid

__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning",
    "BalanceError",
    "ComplexField",
    "ConfigurationError",
    "DivergenceError",
    "DomainError",
    "Grid1D",
    "NlsError",
    "NumericalError",
    "ParameterError",
    "Spectrum",
    "make_grid",
]
