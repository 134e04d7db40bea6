"""Numerical checks of adiabatic cavity elimination in quantum Langevin equations."""

__version__ = "0.1.0"

from .analytic import (
    CutoffSpec,
    SystemParams,
    adiabatic_delta_coefficient,
    commutator_cutoff,
    correlation_exact,
    d_bound,
    delta_expansion_coefficients,
    eliminated_occupation,
    eliminated_rate,
    f_leading,
    full_occupation_ss,
    s_bound,
)
from .expansion import TestFunction, convolution_expansion_check
from .moments import (
    ComparisonReport,
    MomentState,
    compare_eliminated,
    drift_matrix,
    evolve,
    regression_correlation,
    steady_state,
)
from .noise import (
    BathModes,
    NoiseSeries,
    filter_exponential,
    mc_correlation,
    render_noise,
    synthesize_modes,
)
from .quadrature import (
    QuadratureConfig,
    ResidueReport,
    integrate_f,
    integrate_lorentzian,
    residue_check,
)
from .series import CorrelationSeries
