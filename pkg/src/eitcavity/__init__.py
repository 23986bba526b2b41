"""Two atomic ensembles coupled through a single cavity mode.

Steady-state response to a drive on one ensemble, fluctuation spectra of all
three modes, independent numerical cross-checks, and classification of
EIT-like transparency windows.
"""

__version__ = "0.1.0"

from .analysis import ExtremaReport, WindowReport, classify_window, detect_windows, find_extrema
from .errors import (
    ConfigError,
    EitCavityError,
    EmptyCurveError,
    IntegrationDivergedError,
    LowExcitationWarning,
    SingularParametersError,
)
from .model import (
    DriftMatrix,
    FrequencySet,
    MicroscopicParams,
    SystemParams,
    detunings,
    drift_matrix,
    effective_from_microscopic,
    thermal_occupation,
)
from .spectra import (
    SpectrumCurve,
    cavity_spectrum,
    effective_cavity_omega,
    ensemble_spectra,
    k_factors,
    spectra_resolvent_oracle,
    spectrum_sweep,
)
from .steady import (
    ResponseCurve,
    SteadyState,
    effective_cavity_zero,
    response_sweep,
    steady_state_analytic,
    steady_state_numeric,
    susceptibilities,
)
from .stochastic import SimulationConfig, estimate_spectrum, simulate_trajectory
