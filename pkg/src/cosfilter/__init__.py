"""Cosine-filter ground-state toolkit.

Repeatedly applying cos(H' dt) to a statevector (the ancilla-post-selected
half of exp(-i H' (x) Y dt)) filters out high-energy components and converges
to the ground state of H'. This package implements that driver exactly on a
dense statevector, plus variational hybrids, state recording, a QAOA
baseline, and an experiment harness.
"""

from .kernels import BACKEND as kernel_backend
from .pauli import (
    Hamiltonian,
    PauliString,
    PauliTerm,
    SpectralInfo,
    parse_coefficient_table,
    pauli_coefficient_table,
    shift_and_timestep,
    spectral_info,
)
from .problems import (
    SatInstance,
    clause_projector,
    parse_dimacs,
    sat_to_hamiltonian,
    tfim_hamiltonian,
)
from .statevector import (
    Gate,
    StateVector,
    apply_cos_sin,
    apply_gate,
    expectation,
    fidelity_to_ground_space,
    overlap,
    pauli_expectation,
    plus_state,
    project_qubit,
    zero_state,
)
from .filtering import (
    EvolutionTrace,
    FilterConfig,
    nh_evolve,
    nh_step,
    postprocess_energy,
    required_steps_estimate,
    time_translation_check,
)
from .optimize import MinimizeResult, OptimizerConfig, minimize
from .variational import (
    AnsatzSpec,
    QaoaConfig,
    ansatz_apply,
    ansatz_preset,
    hybrid_cucu,
    hybrid_uucc,
    qaoa_run,
    resource_estimate,
)
from .recording import (
    RecordingConfig,
    full_record_run,
    full_record_segment,
    reduced_record_co,
    reduced_record_mb,
    segment_length_for_eta,
    threshold_correlations,
)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "Hamiltonian",
    "PauliString",
    "PauliTerm",
    "SpectralInfo",
    "parse_coefficient_table",
    "pauli_coefficient_table",
    "shift_and_timestep",
    "spectral_info",
    "SatInstance",
    "clause_projector",
    "parse_dimacs",
    "sat_to_hamiltonian",
    "tfim_hamiltonian",
    "Gate",
    "StateVector",
    "apply_cos_sin",
    "apply_gate",
    "expectation",
    "fidelity_to_ground_space",
    "overlap",
    "pauli_expectation",
    "plus_state",
    "project_qubit",
    "zero_state",
    "EvolutionTrace",
    "FilterConfig",
    "nh_evolve",
    "nh_step",
    "postprocess_energy",
    "required_steps_estimate",
    "time_translation_check",
    "MinimizeResult",
    "OptimizerConfig",
    "minimize",
    "AnsatzSpec",
    "QaoaConfig",
    "ansatz_apply",
    "ansatz_preset",
    "hybrid_cucu",
    "hybrid_uucc",
    "qaoa_run",
    "resource_estimate",
    "RecordingConfig",
    "full_record_run",
    "full_record_segment",
    "reduced_record_co",
    "reduced_record_mb",
    "segment_length_for_eta",
    "threshold_correlations",
]
