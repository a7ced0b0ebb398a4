"""Weakly coupled spin registers and their secular Hamiltonian.

A register of n spin-1/2 nuclei in one rotating frame is described by the
per-spin resonance offsets nu_k (Hz) and the scalar coupling matrix J (Hz).
In the weak-coupling regime (J much smaller than every offset gap) only the
longitudinal part of the coupling survives, so the Hamiltonian

    H = -1/2 * ( sum_k w_k sz_k  +  pi * sum_{k>m} J_mk sz_m sz_k ),
    w_k = 2 pi nu_k,  hbar = 1

is diagonal in the computational basis.  Basis states are ordered
lexicographically with spin 1 as the most significant bit, so index 0 is
|0...00> and index 2^n - 1 is |1...11>.

Offsets and couplings are stored in Hz; Hamiltonians and energies are
returned in rad/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SpinSystem",
    "WeakCouplingWarning",
    "build_system",
    "hamiltonian",
    "hamiltonian_diagonal",
    "basis_energy",
    "transition_frequency",
    "transition_pair",
    "state_index",
    "state_bits",
    "normalize_controls",
]


class WeakCouplingWarning(UserWarning):
    """Raised (as a warning) when max |J| is not small against the offset gaps."""


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Immutable register description.

    Attributes:
        n: number of spins.
        offsets_hz: per-spin resonance offsets, strictly increasing.
        couplings_hz: symmetric n x n scalar coupling matrix, zero diagonal.
        weak_coupling_ok: False when max |J| >= the smallest adjacent offset
            gap, i.e. the secular approximation is questionable.
    """

    n: int
    offsets_hz: np.ndarray
    couplings_hz: np.ndarray
    weak_coupling_ok: bool = True

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def coupling(self, spin_a: int, spin_b: int) -> float:
        """J between two spins (1-based indices), in Hz."""
        return float(self.couplings_hz[spin_a - 1, spin_b - 1])

    def __repr__(self) -> str:  # compact, for reports
        offs = ", ".join(f"{v:g}" for v in self.offsets_hz)
        return f"SpinSystem(n={self.n}, offsets_hz=[{offs}])"


def build_system(offsets_hz: Sequence[float], couplings_hz) -> SpinSystem:
    """Validate offsets/couplings and assemble a SpinSystem.

    Raises ValueError on inconsistent dimensions, an asymmetric or
    nonzero-diagonal coupling matrix, or non-increasing offsets.  A violated
    weak-coupling assumption only warns, so that the regime boundary can
    still be probed.
    """
    offsets = np.asarray(offsets_hz, dtype=float).reshape(-1)
    n = offsets.size
    if n < 1:
        raise ValueError("need at least one spin")
    couplings = np.asarray(couplings_hz, dtype=float)
    if couplings.shape != (n, n):
        raise ValueError(
            f"couplings must be {n}x{n} to match {n} offsets, got {couplings.shape}"
        )
    if not np.array_equal(couplings, couplings.T):
        raise ValueError("coupling matrix must be symmetric")
    if np.any(np.diagonal(couplings) != 0.0):
        raise ValueError("coupling matrix diagonal must be exactly zero")
    if n > 1 and not np.all(np.diff(offsets) > 0.0):
        raise ValueError("offsets must be strictly increasing")

    weak_ok = True
    if n > 1:
        min_gap = float(np.min(np.diff(offsets)))
        max_j = float(np.max(np.abs(couplings)))
        if max_j >= min_gap:
            weak_ok = False
            warnings.warn(
                f"max |J| = {max_j:g} Hz is not small against the minimum "
                f"offset gap {min_gap:g} Hz; secular (weak-coupling) form "
                "is a poor approximation",
                WeakCouplingWarning,
                stacklevel=2,
            )
    offsets.setflags(write=False)
    couplings.setflags(write=False)
    return SpinSystem(n=n, offsets_hz=offsets, couplings_hz=couplings,
                      weak_coupling_ok=weak_ok)


def state_bits(index: int, n: int) -> tuple[int, ...]:
    """Bits (b_1, ..., b_n) of a basis index, spin 1 first (MSB)."""
    if not 0 <= index < 2 ** n:
        raise ValueError(f"basis index {index} out of range for {n} spins")
    return tuple((index >> (n - k)) & 1 for k in range(1, n + 1))


def state_index(bits: Iterable[int]) -> int:
    """Basis index of a bit pattern (spin 1 first)."""
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        idx = (idx << 1) | b
    return idx


def _z_signs(n: int) -> np.ndarray:
    """(2^n, n) array of sz eigenvalues, +1 for bit 0 and -1 for bit 1."""
    idx = np.arange(2 ** n)
    shifts = np.arange(n - 1, -1, -1)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return 1.0 - 2.0 * bits


def hamiltonian_diagonal(system: SpinSystem) -> np.ndarray:
    """Diagonal of the secular Hamiltonian, rad/s, one entry per basis state."""
    s = _z_signs(system.n)
    w = 2.0 * np.pi * system.offsets_hz
    zeeman = s @ w
    # pairwise sz sz terms, each unordered pair once
    coupling = np.zeros(system.dim)
    for k in range(system.n):
        for m in range(k):
            jmk = system.couplings_hz[m, k]
            if jmk != 0.0:
                coupling += np.pi * jmk * s[:, m] * s[:, k]
    return -0.5 * (zeeman + coupling)


def hamiltonian(system: SpinSystem) -> np.ndarray:
    """Full 2^n x 2^n Hamiltonian matrix (diagonal, real entries), rad/s."""
    return np.diag(hamiltonian_diagonal(system)).astype(complex)


def basis_energy(system: SpinSystem, index: int) -> float:
    """Energy of one basis state in rad/s."""
    bits = state_bits(index, system.n)  # validates the range
    s = np.array([1.0 - 2.0 * b for b in bits])
    w = 2.0 * np.pi * system.offsets_hz
    e = float(s @ w)
    for k in range(system.n):
        for m in range(k):
            e += np.pi * system.couplings_hz[m, k] * s[m] * s[k]
    return -0.5 * e


def normalize_controls(system: SpinSystem, target: int, controls) -> tuple[int, ...]:
    """Control bit pattern as a tuple, one bit per non-target spin ascending.

    Accepts a string like "01" or any sequence of 0/1.
    """
    if not 1 <= target <= system.n:
        raise ValueError(f"target spin {target} out of range 1..{system.n}")
    if isinstance(controls, str):
        bits = tuple(int(c) for c in controls)
    else:
        bits = tuple(int(c) for c in controls)
    if len(bits) != system.n - 1:
        raise ValueError(
            f"control pattern must have {system.n - 1} bits, got {len(bits)}"
        )
    if any(b not in (0, 1) for b in bits):
        raise ValueError("control pattern bits must be 0 or 1")
    return bits


def transition_pair(system: SpinSystem, target: int, controls) -> tuple[int, int]:
    """Basis indices (target=0, target=1) of a single-quantum transition."""
    bits = normalize_controls(system, target, controls)
    full = list(bits)
    full.insert(target - 1, 0)
    idx0 = state_index(full)
    full[target - 1] = 1
    return idx0, state_index(full)


def transition_frequency(system: SpinSystem, target: int, controls) -> float:
    """Line position (Hz) of the target spin for a given control pattern.

    Each coupled spin m shifts the target line by +J_mt/2 when its bit is 1
    and -J_mt/2 when it is 0, so the all-ones pattern sits at
    nu_target + sum_m J_mt / 2 for positive couplings.
    """
    bits = normalize_controls(system, target, controls)
    others = [k for k in range(1, system.n + 1) if k != target]
    nu = float(system.offsets_hz[target - 1])
    for spin, bit in zip(others, bits):
        nu += 0.5 * system.coupling(spin, target) * (1.0 if bit else -1.0)
    return nu
