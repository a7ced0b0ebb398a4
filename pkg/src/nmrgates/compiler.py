"""Multi-controlled NOT networks and pulse-program emission.

Two physical realizations are compiled here:

* CNOT networks: the Toffoli gate from five two-qubit gates using the
  controlled square root of NOT, and the three-control gate from thirteen
  two-qubit gates using fourth roots.  Both products reproduce the exact
  multi-controlled NOT; they are verified at the unitary level only, since
  running them pulse-by-pulse in a >2 spin register would additionally need
  refocusing of all spectator couplings.
* Single transition-selective pulses: one weak pi pulse whose carrier sits
  on the |1...10> <-> |1...11> line of the target multiplet realizes the
  phase-modified multi-controlled NOT directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gates
from .pulse import Delay, Pulse, PulseProgram, gaussian_area_fraction
from .spin_system import SpinSystem, transition_frequency

__all__ = [
    "GateOp",
    "GateSequence",
    "decompose_toffoli",
    "decompose_lambda3",
    "sequence_unitary",
    "sequence_to_text",
    "modified_cnot_pulse_program",
    "lambda_pulse_program",
    "DEFAULT_SELECTIVITY_FACTOR",
]

# pulse amplitude as a fraction of the smallest coupling to the target;
# keeps the excitation bandwidth well inside the multiplet splittings
DEFAULT_SELECTIVITY_FACTOR = 0.2


@dataclass(frozen=True)
class GateOp:
    name: str
    matrix: np.ndarray
    wires: tuple[int, ...]


@dataclass(frozen=True)
class GateSequence:
    """Ordered gates with register wiring; first element is applied first."""

    ops: tuple[GateOp, ...]
    n: int

    def __post_init__(self):
        for op in self.ops:
            if len(set(op.wires)) != len(op.wires):
                raise ValueError(f"duplicate wires in {op.name}: {op.wires}")
            if any(not 1 <= w <= self.n for w in op.wires):
                raise ValueError(f"{op.name} wires {op.wires} out of range 1..{self.n}")
            if op.matrix.shape != (2 ** len(op.wires),) * 2:
                raise ValueError(f"{op.name} matrix does not match its wire count")

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for op in self.ops if len(op.wires) == 2)

    @property
    def one_qubit_count(self) -> int:
        return sum(1 for op in self.ops if len(op.wires) == 1)


def _cx_pow(exponent: float) -> np.ndarray:
    return gates.controlled(gates.x_power(exponent))


def decompose_toffoli() -> GateSequence:
    """Toffoli from five two-qubit gates (controls 1, 2; target 3).

    Controlled V = sqrt(NOT) gates interleaved with CNOTs apply V^2 = X to
    the target exactly when both controls are 1:
    CV(2,3), CNOT(1,2), CV+(2,3), CNOT(1,2), CV(1,3).
    """
    cnot = gates.lambda_not(1)
    ops = (
        GateOp("cxpow^0.5", _cx_pow(0.5), (2, 3)),
        GateOp("cnot", cnot, (1, 2)),
        GateOp("cxpow^-0.5", _cx_pow(-0.5), (2, 3)),
        GateOp("cnot", cnot, (1, 2)),
        GateOp("cxpow^0.5", _cx_pow(0.5), (1, 3)),
    )
    return GateSequence(ops=ops, n=3)


def decompose_lambda3() -> GateSequence:
    """Three-control NOT from thirteen two-qubit gates (target 4).

    Controlled W = NOT^(1/4) gates walk a Gray code over the control
    parities; the signed parity exponents telescope to W^4 = X exactly when
    all three controls are 1.
    """
    cnot = gates.lambda_not(1)
    cw = _cx_pow(0.25)
    cw_dag = _cx_pow(-0.25)
    ops = (
        GateOp("cxpow^0.25", cw, (1, 4)),
        GateOp("cnot", cnot, (1, 2)),
        GateOp("cxpow^-0.25", cw_dag, (2, 4)),
        GateOp("cnot", cnot, (1, 2)),
        GateOp("cxpow^0.25", cw, (2, 4)),
        GateOp("cnot", cnot, (2, 3)),
        GateOp("cxpow^-0.25", cw_dag, (3, 4)),
        GateOp("cnot", cnot, (1, 3)),
        GateOp("cxpow^0.25", cw, (3, 4)),
        GateOp("cnot", cnot, (2, 3)),
        GateOp("cxpow^-0.25", cw_dag, (3, 4)),
        GateOp("cnot", cnot, (1, 3)),
        GateOp("cxpow^0.25", cw, (3, 4)),
    )
    return GateSequence(ops=ops, n=4)


def sequence_unitary(seq: GateSequence) -> np.ndarray:
    """Ordered product of the embedded gates (first gate applied first)."""
    u = np.eye(2 ** seq.n, dtype=complex)
    for op in seq.ops:
        u = gates.embed(op.matrix, op.wires, seq.n) @ u
    return u


def sequence_to_text(seq: GateSequence) -> str:
    """One gate per line: kind and wires, control first."""
    lines = [f"{op.name} wires={','.join(str(w) for w in op.wires)}"
             for op in seq.ops]
    return "\n".join(lines) + "\n"


def _spin_selective_amplitude(system: SpinSystem, target: int, j_hz: float) -> float:
    """Amplitude covering a whole multiplet while sparing the other spins."""
    gaps = [abs(system.offsets_hz[k] - system.offsets_hz[target - 1])
            for k in range(system.n) if k != target - 1]
    return min(10.0 * j_hz, min(gaps) / 5.0)


def modified_cnot_pulse_program(system: SpinSystem, control: int, target: int,
                                amplitude_hz: float | None = None) -> PulseProgram:
    """Two-pulse CNOT up to relative phases, for a two-spin register.

    A spin-selective pi/2 pulse on the target about x, a free delay of
    1/(2J) seconds (a pi/2 evolution under the pi*J*szsz/2 coupling term),
    then a pi/2 pulse about y.  The pulses cover the target's whole doublet,
    so their amplitude must sit between J and the offset gap.
    """
    if system.n != 2:
        raise ValueError("modified CNOT pulse program needs a 2-spin system")
    if control == target or not {control, target} <= {1, 2}:
        raise ValueError("control and target must be spins 1 and 2 in some order")
    j = system.coupling(control, target)
    if j == 0.0:
        raise ValueError("control and target are uncoupled")
    if amplitude_hz is None:
        amplitude_hz = _spin_selective_amplitude(system, target, abs(j))
    carrier = float(system.offsets_hz[target - 1])
    quarter = 1.0 / (4.0 * amplitude_hz)
    return PulseProgram(events=(
        Pulse(carrier_hz=carrier, amplitude_hz=amplitude_hz, phase_rad=0.0,
              duration_s=quarter),
        Delay(duration_s=1.0 / (2.0 * abs(j))),
        Pulse(carrier_hz=carrier, amplitude_hz=amplitude_hz,
              phase_rad=np.pi / 2.0, duration_s=quarter),
    ))


def lambda_pulse_program(system: SpinSystem, controls: Sequence[int], target: int,
                         amplitude_hz: float | None = None,
                         shape: str = "rectangular") -> PulseProgram:
    """Single transition-selective pi pulse realizing the modified gate.

    The carrier sits on the target line with every control spin in |1>.
    The default amplitude is DEFAULT_SELECTIVITY_FACTOR times the smallest
    coupling to the target, and the duration makes the nominal flip angle
    pi (for a gaussian envelope the duration is stretched by the envelope
    area).  Requires the target to be referenced at (or near) 0 Hz, as the
    built-in presets are, so that the carrier is resonant.
    """
    controls = sorted(controls)
    expected = [k for k in range(1, system.n + 1) if k != target]
    if controls != expected:
        raise ValueError(
            f"controls {controls} plus target {target} must cover all spins 1..{system.n}"
        )
    target_couplings = [abs(system.coupling(c, target)) for c in controls]
    for c, j in zip(controls, target_couplings):
        if j == 0.0:
            raise ValueError(
                f"spin {c} is not coupled to target {target}; its transition "
                "cannot be resolved"
            )
    j_min = min(target_couplings)
    if amplitude_hz is None:
        amplitude_hz = DEFAULT_SELECTIVITY_FACTOR * j_min
    if not amplitude_hz > 0.0:
        raise ValueError("pulse amplitude must be > 0")

    carrier = transition_frequency(system, target, "1" * len(controls))
    nu_target = float(system.offsets_hz[target - 1])
    if abs(nu_target) > 0.01 * j_min:
        warnings.warn(
            f"target spin {target} is referenced at {nu_target:g} Hz; the "
            "selective pulse assumes the target near 0 Hz and will be "
            "detuned otherwise",
            UserWarning,
            stacklevel=2,
        )

    # carrier must clear every other target line by at least the smallest J
    patterns = [format(i, f"0{len(controls)}b") for i in range(2 ** len(controls))]
    for pattern in patterns[:-1]:
        sep = abs(carrier - transition_frequency(system, target, pattern))
        if sep < j_min - 1e-9:
            raise ValueError(
                f"carrier separation {sep:g} Hz to pattern {pattern} is below "
                f"the minimum coupling {j_min:g} Hz"
            )

    duration = 1.0 / (2.0 * amplitude_hz)
    if shape == "gaussian":
        duration /= gaussian_area_fraction()
    return PulseProgram(events=(
        Pulse(carrier_hz=carrier, amplitude_hz=float(amplitude_hz),
              phase_rad=0.0, duration_s=duration, shape=shape),
    ))
