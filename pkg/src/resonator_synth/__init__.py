"""Photon-number-selective state synthesis in two resonators coupled through one qubit."""
from .compiler import (GateSequence, TargetSpec, compile_general, compile_noon, compile_target,
                       estimate_duration_general, estimate_duration_noon, lower_schedule,
                       make_target, random_target)
from .dispersive import (SystemParams, delta_omega, diagonal_frequency, drive_frequency,
                         estimate_params, scan_params, matched_qubit_frequency,
                         max_selective_amplitude)
from .fock import (DenseOperator, HilbertSpace, StateVector, build_ladder_operators, fidelity,
                   partial_trace_qubit)
from .gates import A, B, R, Z, apply_gate, apply_sequence, gate_matrix
from .hamiltonian import PulseSchedule, build_hamiltonian, propagate_constant, propagate_schedule

__version__ = "0.1.0"
