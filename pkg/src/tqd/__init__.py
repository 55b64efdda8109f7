"""Transitionless (counterdiabatic) driving for time-dependent spin systems."""

from .dynamics import FidelityTrace, IntegratorConfig, adiabatic_reference, evolve, fidelity, propagate
from .engine import (
    HamiltonianFunction,
    adiabaticity_metric,
    cd_term_degenerate,
    cd_term_for_state,
    cd_term_matrix_elements,
    cd_term_spectral,
    fixed_point_residual,
    gauge_align,
)
from .errors import (
    ArgumentError,
    CapacityError,
    DegeneracyError,
    DivergenceError,
    IntegrationError,
    LevelCrossingError,
    NumericError,
    SingularityError,
    TQDError,
    TrackingLossError,
)
from .experiments import build_model, run_fidelity_trace, run_size_sweep
from .operators import SpectralFrame, collective_spin, commutator, eigh_sorted, embed_pauli, kron, pauli
from .params import Couplings, LmgParams, ParamTriple
from .schedules import Schedule, build_schedule

__version__ = "0.1.0"
