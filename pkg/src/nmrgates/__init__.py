"""Simulator for multi-controlled NOT gates on liquid-state NMR registers.

Builds weak-coupling spin Hamiltonians, realizes multi-controlled NOT gates
three ways (ideal unitaries, two-qubit CNOT networks, single
transition-selective pi pulses) and synthesizes the spectral readout that
distinguishes them.
"""

from .compiler import (GateOp, GateSequence, decompose_lambda3,
                       decompose_toffoli, lambda_pulse_program,
                       modified_cnot_pulse_program, sequence_unitary)
from .gates import (embed, gate_fidelity, lambda_not, modified_lambda_not,
                    phase_stripped_fidelity, rotation, x_power)
from .presets import describe_presets, load_system_file, preset_system
from .pulse import (Delay, Propagator, Pulse, PulseProgram, program_from_text,
                    program_to_text, program_unitary, propagate_state,
                    selectivity_scan)
from .spectrum import (AcquisitionParams, Peak, Spectrum, assign_peaks,
                       detect_peaks, readout_prepare, spectrum_of,
                       synthesize_fid)
from .spin_system import (SpinSystem, basis_energy, build_system, hamiltonian,
                          hamiltonian_diagonal, transition_frequency)
from .states import (DEFAULT_BETA_SCALE, apply_gate, deviation_state,
                     population_difference, populations, thermal_state)

__version__ = "0.1.0"
