"""Quantum side: frames, IC-POVMs, Born statistics, reduced maps, F_S-separability."""

from .born import QuantumScenario, born_statistics, evolve, measure_update, outcome_probabilities, reprepare
from .frames import (
    ICPOVM,
    QuantumFrame,
    fdc,
    frame_operator_apply,
    frame_operator_invert,
    imm_from_povm,
    product_frame,
    random_povm,
    reconstruct,
    sic_qubit_frame,
    sic_qubit_vectors,
    standard_frame,
)
from .linalg import (
    hermitian_basis,
    partial_trace_env,
    partial_trace_system,
    random_density,
    random_state_vector,
    random_unitary,
)
from .maps import FPositivityReport, ReducedMap, check_f_positivity, reduced_map
from .separability import (
    ConditionalEnvOperator,
    ProbeResult,
    SeparabilityReport,
    check_f_separability_state,
    probe_f_separability_unitary,
    random_f_separable_state,
)
