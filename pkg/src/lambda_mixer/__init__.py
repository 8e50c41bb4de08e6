"""Coupled-mode simulator for resonant four-wave mixing in double-lambda media."""

from .analysis import (
    ConversionMetrics,
    InvariantValues,
    SeedSpec,
    detect_conversion,
    invariants_of,
    make_initial_state,
    predict_no_phase,
    predict_with_phase,
    relative_phase,
    sweep_epsilon,
)
from .levelsys import (
    EigenResult,
    FieldState,
    SystemParams,
    build_hamiltonian_4,
    build_hamiltonian_5,
    eig_exact,
    grad_conjugate,
    lambda0_pert_4,
    lambda0_pert_5,
    select_ground_branch,
)
from .propagator import (
    BackendSpec,
    FieldDerivatives,
    Method,
    Model,
    PropagationGrid,
    Trajectory,
    integrate,
    rhs_closed_form,
    rhs_eigen_gradient,
)

__version__ = "0.1.0"
