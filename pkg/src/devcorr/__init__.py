"""Classical and quantum correlations of two-qubit NMR deviation matrices,
their decay under quadrupolar relaxation, and parameter fitting."""
from __future__ import annotations

from .core import DeviationMatrix, ThermalState, fidelity, partial_trace, von_neumann_entropy
from .correlations import (
    CorrelationReport,
    MeasurementBasis,
    OptimizerConfig,
    classical_correlation_K,
    discord_exact,
    mutual_information_exact,
    mutual_information_expansion,
    one_sided_exact,
    quantum_correlation_Q,
)
from .fitting import add_noise, estimate_parameters, fit_exponential
from .relaxation import NA23_PARAMS, RelaxationParams, evolve, r_coefficients, time_constants, time_series
from .states import bell_pseudopure, computational, equilibrium_deviation, pseudopure, random_x, x_pseudopure

__version__ = "0.1.0"
