"""Simulation and verification toolkit for the stochastic fractional heat equation
with Riesz-colored noise on a periodic grid."""

from .grid import GridSpec
from .errors import (
    FracHeatError,
    ParameterError,
    ResolutionError,
    NumericalError,
    InputError,
    UsageError,
    BlowUpError,
    DegenerateDataError,
    RangeError,
    ConfigError,
)

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "FracHeatError",
    "ParameterError",
    "ResolutionError",
    "NumericalError",
    "InputError",
    "UsageError",
    "BlowUpError",
    "DegenerateDataError",
    "RangeError",
    "ConfigError",
    "__version__",
]
