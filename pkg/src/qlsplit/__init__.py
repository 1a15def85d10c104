"""Pseudo-spectral Strang-splitting toolkit for 1D periodic quasilinear
Schrodinger equations: stepping, conservation diagnostics, convergence
studies, blow-up detection, and plane-wave linear stability analysis."""

from .diagnostics import (
    ConvergenceRow,
    ConvergenceTable,
    energy,
    error_norms,
    fit_order,
    mass,
)
from .model import (
    Gaussian,
    InitialCondition,
    ModelSpec,
    MultiMode,
    Perturbation,
    PlaneWave,
    build_initial_condition,
    ellipticity_indicator,
    exact_plane_wave,
    pde_residual,
    potential_field,
)
from .spectral import (
    Field,
    GridSpec,
    apply_mollifier,
    dealias_two_thirds,
    free_propagator,
    h1_seminorm,
    krasny_filter,
    l2_norm,
    spectral_derivative,
    to_physical,
    to_spectrum,
)
from .splitting import (
    BlowupReport,
    SimulationRecord,
    StabilityAdvisory,
    StepperConfig,
    nonlinear_phase_step,
    run_simulation,
    stability_advisory,
    strang_step,
)
from .stability import (
    AmplitudeVerdict,
    ModeGrowth,
    PlaneWaveLinearization,
    SplitStepMultipliers,
    gn_eigenvalues,
    gn_matrix,
    split_step_mode_growth,
    split_step_update_matrix,
    stability_threshold_scan,
    two_by_two_eigenvalues,
)

__version__ = "0.1.0"
