"""Numerical simulator of a dispersive, heralded remote-entanglement operation
between two optically active matter qubits in leaky cavities."""

from .analytic import (
    SourceSpec,
    analytic_success_dispersive,
    coherent_leading_order,
    effective_phase,
    ideal_interferometer_state,
    ideal_success_probability,
    source_fidelity_bound,
)
from .dynamics import (
    EvolutionResult,
    ModelParams,
    Trajectory,
    build_hamiltonian,
    evolve,
    lindblad_rhs,
)
from .errors import (
    ConditionalStateError,
    ConfigurationError,
    DimensionError,
    EoSimError,
    IntegrationError,
    NumericalHealthError,
)
from .hilbert import (
    DensityMatrix,
    Operator,
    SpaceDescriptor,
    annihilator,
    atomic_operators,
    embed,
    partial_trace,
)
from .protocol import (
    BellTargets,
    RunSummary,
    bell_targets,
    click_density,
    detector_jump_operator,
    fidelity_vs_target,
    post_click_atom_state,
    prepare_initial_state,
    run_protocol,
)
from .sweep import SweepRow, SweepSpec, gamma_from_normalized, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BellTargets",
    "ConditionalStateError",
    "ConfigurationError",
    "DensityMatrix",
    "DimensionError",
    "EoSimError",
    "EvolutionResult",
    "IntegrationError",
    "ModelParams",
    "NumericalHealthError",
    "Operator",
    "RunSummary",
    "SourceSpec",
    "SpaceDescriptor",
    "SweepRow",
    "SweepSpec",
    "Trajectory",
    "analytic_success_dispersive",
    "annihilator",
    "atomic_operators",
    "bell_targets",
    "build_hamiltonian",
    "click_density",
    "coherent_leading_order",
    "detector_jump_operator",
    "effective_phase",
    "embed",
    "evolve",
    "fidelity_vs_target",
    "gamma_from_normalized",
    "ideal_interferometer_state",
    "ideal_success_probability",
    "lindblad_rhs",
    "partial_trace",
    "post_click_atom_state",
    "prepare_initial_state",
    "run_protocol",
    "run_sweep",
    "source_fidelity_bound",
]
