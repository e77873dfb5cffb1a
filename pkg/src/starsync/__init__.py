"""starsync: star-network oscillator modes, open dynamics and synchronization."""

from .errors import (
    DegenerateFitError,
    DegenerateNetworkError,
    DiagnosticsError,
    DomainError,
    FrameError,
    InstabilityError,
    IntegrationAccuracyError,
    ParameterError,
    PerturbationError,
    ResourceLimitError,
    StarsyncError,
)
from .model import NetworkParams, PotentialDecomposition, build_potential, thermal_occupation
from .modes import (
    ExactSpectrum,
    ModeDecomposition,
    SqueezingEstimate,
    classify_exact_modes,
    exact_diagonalize,
    g_eigensystem,
    perturb_corrections,
    squeezing_estimate,
)
from .transform import (
    BogoliubovMap,
    CanonicalTransform,
    bogoliubov_map,
    build_canonical_transform,
    exact_canonical_transform,
)
from .dynamics import (
    DissipationSpec,
    GaussianState,
    ModePrep,
    SyncMetrics,
    Trajectory,
    evolve_gaussian,
    init_state,
    make_dissipation,
    occupation_series,
    position_trajectory,
    sync_metrics,
    to_normal_frame,
    to_physical_frame,
)
from .fock import fock_oracle_evolve
from .sweep import FitResult, SweepResult, frequency_sweep, scaling_fit
from .config import RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "BogoliubovMap",
    "CanonicalTransform",
    "DegenerateFitError",
    "DegenerateNetworkError",
    "DiagnosticsError",
    "DissipationSpec",
    "DomainError",
    "ExactSpectrum",
    "FitResult",
    "FrameError",
    "GaussianState",
    "InstabilityError",
    "IntegrationAccuracyError",
    "ModeDecomposition",
    "ModePrep",
    "NetworkParams",
    "ParameterError",
    "PerturbationError",
    "PotentialDecomposition",
    "ResourceLimitError",
    "RunConfig",
    "SqueezingEstimate",
    "StarsyncError",
    "SweepResult",
    "SyncMetrics",
    "Trajectory",
    "bogoliubov_map",
    "build_canonical_transform",
    "build_potential",
    "classify_exact_modes",
    "evolve_gaussian",
    "exact_canonical_transform",
    "exact_diagonalize",
    "fock_oracle_evolve",
    "frequency_sweep",
    "g_eigensystem",
    "init_state",
    "load_config",
    "make_dissipation",
    "occupation_series",
    "perturb_corrections",
    "position_trajectory",
    "scaling_fit",
    "squeezing_estimate",
    "sync_metrics",
    "thermal_occupation",
    "to_normal_frame",
    "to_physical_frame",
]
