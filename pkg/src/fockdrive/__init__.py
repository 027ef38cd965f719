"""Engineering bosonic code states with quantum lattice gates.

Truncated-Fock-space toolkit: cat/binomial code words, noncommutative Fourier
synthesis of drive charts, lattice-gate compilation, adiabatic-ramp evolution,
parity-measurement error correction, and phase-space diagnostics.
"""

from .engine import (
    NonUnitaryDrift,
    RampSchedule,
    TargetSpec,
    Trajectory,
    ZeroOverlap,
    build_target,
    evolve,
    fidelity,
    geometric_phase,
    initial_state,
    schedule_eval,
    snapshots_to_json,
    state_to_pairs,
    target_state,
    trajectory_to_csv,
    transition_h,
)
from .codes import (
    CodeFamily,
    CodeWordSet,
    KLReport,
    binomial_words,
    cat_norm_factor,
    cat_words,
    kl_matrix,
    loss_cycle_overlaps,
    mean_photon,
    sweet_spot,
)
from .fockspace import (
    CutoffRisk,
    DensityMatrix,
    HilbertConfig,
    Operator,
    StateVector,
    coherent_state,
    displacement,
    fock_state,
    ladder,
    momentum,
    number_op,
    parity,
    plane_wave,
    position,
    rotation,
    squeeze,
)
from .gates import (
    DegenerateDirection,
    GateParams,
    GateSequence,
    chart_fingerprint,
    compile_sequence,
    grid_gate,
    position_eigensystem,
    psl,
    psl_via_rotation,
    sequence_from_json,
    sequence_to_json,
    tm_psl,
    xi_gate,
    xsl,
    xsl_via_squeeze,
)
from .ncft import (
    AqecCat,
    DriveChart,
    EmbedBinomial,
    NcftSpec,
    SeriesTruncation,
    SingleState,
    Transform,
    cat_word_vector,
    chart_to_files,
    drive_chart,
    f_component,
    f_target,
    husimi_target,
    reconstruct,
    target_operator,
)
from .phase_space import PhaseGrid, grid_to_csv, grid_to_json_sidecar, q_function, wigner

__all__ = [
    "AqecCat",
    "CodeFamily",
    "CodeWordSet",
    "CutoffRisk",
    "DegenerateDirection",
    "DensityMatrix",
    "DriveChart",
    "EmbedBinomial",
    "GateParams",
    "GateSequence",
    "HilbertConfig",
    "KLReport",
    "NcftSpec",
    "NonUnitaryDrift",
    "Operator",
    "PhaseGrid",
    "RampSchedule",
    "SeriesTruncation",
    "SingleState",
    "StateVector",
    "TargetSpec",
    "Trajectory",
    "Transform",
    "ZeroOverlap",
    "binomial_words",
    "build_target",
    "cat_norm_factor",
    "cat_word_vector",
    "cat_words",
    "chart_fingerprint",
    "chart_to_files",
    "coherent_state",
    "compile_sequence",
    "displacement",
    "drive_chart",
    "evolve",
    "f_component",
    "f_target",
    "fidelity",
    "fock_state",
    "geometric_phase",
    "grid_gate",
    "grid_to_csv",
    "grid_to_json_sidecar",
    "husimi_target",
    "initial_state",
    "kl_matrix",
    "ladder",
    "loss_cycle_overlaps",
    "mean_photon",
    "momentum",
    "number_op",
    "parity",
    "plane_wave",
    "position",
    "position_eigensystem",
    "psl",
    "psl_via_rotation",
    "q_function",
    "reconstruct",
    "rotation",
    "schedule_eval",
    "sequence_from_json",
    "sequence_to_json",
    "snapshots_to_json",
    "squeeze",
    "state_to_pairs",
    "sweet_spot",
    "target_operator",
    "target_state",
    "tm_psl",
    "trajectory_to_csv",
    "transition_h",
    "wigner",
    "xi_gate",
    "xsl",
    "xsl_via_squeeze",
]
