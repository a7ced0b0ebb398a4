"""Density matrices: thermal equilibrium, deviation part, gate action, readout.

At room temperature the level splittings are tiny against k_B T, so the
equilibrium state is extremely close to the maximally mixed one.  Instead of
carrying physical constants around, a single dimensionless inverse
temperature ``beta_scale`` multiplies the energies (rad/s) in the Boltzmann
exponent; the default 1e-5 puts the polarization at a typical NMR scale.
Only population orderings and differences matter for the simulated spectra.
"""

from __future__ import annotations

import numpy as np

from .spin_system import SpinSystem, hamiltonian_diagonal, transition_pair

__all__ = [
    "DEFAULT_BETA_SCALE",
    "thermal_state",
    "deviation_state",
    "apply_gate",
    "populations",
    "population_difference",
    "validate_density_matrix",
    "save_matrix_text",
    "load_matrix_text",
]

DEFAULT_BETA_SCALE = 1e-5

_HERMITICITY_TOL = 1e-10
_TRACE_TOL = 1e-10
_EIGENVALUE_FLOOR = -1e-9  # tolerate floating-point drift through long programs


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return rho as complex."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > _HERMITICITY_TOL:
        raise ValueError("density matrix is not Hermitian within 1e-10")
    if abs(np.trace(rho) - 1.0) > _TRACE_TOL:
        raise ValueError("density matrix trace differs from 1 by more than 1e-10")
    if np.min(np.linalg.eigvalsh(rho)) < _EIGENVALUE_FLOOR:
        raise ValueError("density matrix has an eigenvalue below -1e-9")
    return rho


def thermal_state(system: SpinSystem, beta_scale: float = DEFAULT_BETA_SCALE) -> np.ndarray:
    """Boltzmann state exp(-beta_scale * H) / Z, diagonal in the energy basis.

    beta_scale -> 0 gives the maximally mixed state; large values populate
    only the lowest level.  The exponent is shifted by the minimum energy
    before exponentiating so extreme scales do not overflow.
    """
    if not beta_scale > 0.0:
        raise ValueError("beta_scale must be > 0")
    energies = hamiltonian_diagonal(system)
    exponents = -beta_scale * (energies - energies.min())
    weights = np.exp(exponents)
    populations_ = weights / weights.sum()
    return np.diag(populations_).astype(complex)


def deviation_state(system: SpinSystem, beta_scale: float = DEFAULT_BETA_SCALE) -> np.ndarray:
    """Traceless first-order part Delta of rho ~ (I + Delta) / 2^n."""
    if not beta_scale > 0.0:
        raise ValueError("beta_scale must be > 0")
    energies = hamiltonian_diagonal(system)
    centered = energies - energies.mean()
    return np.diag(-beta_scale * centered).astype(complex)


def apply_gate(rho: np.ndarray, gate: np.ndarray) -> np.ndarray:
    """Conjugate a state by a unitary: U rho U^dag."""
    rho = np.asarray(rho, dtype=complex)
    gate = np.asarray(gate, dtype=complex)
    if rho.shape != gate.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape}, gate {gate.shape}")
    if np.max(np.abs(gate.conj().T @ gate - np.eye(gate.shape[0]))) > 1e-10:
        raise ValueError("gate is not unitary within 1e-10")
    return gate @ rho @ gate.conj().T


def populations(rho: np.ndarray) -> np.ndarray:
    """Real diagonal of a density matrix (basis-state populations)."""
    return np.real(np.diagonal(np.asarray(rho)))


def population_difference(rho: np.ndarray, system: SpinSystem, target: int,
                          controls) -> float:
    """p(controls, target=0) - p(controls, target=1) for one transition."""
    idx0, idx1 = transition_pair(system, target, controls)
    p = populations(rho)
    return float(p[idx0] - p[idx1])


def save_matrix_text(matrix: np.ndarray, path) -> None:
    """Write a complex matrix as plain text, row-major re/im pairs."""
    matrix = np.asarray(matrix, dtype=complex)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
        for row in matrix:
            fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
            fh.write("\n")


def load_matrix_text(path) -> np.ndarray:
    """Read a matrix written by save_matrix_text."""
    with open(path, "r", encoding="utf-8") as fh:
        rows, cols = (int(tok) for tok in fh.readline().split())
        out = np.empty((rows, cols), dtype=complex)
        for i in range(rows):
            vals = [float(tok) for tok in fh.readline().split()]
            if len(vals) != 2 * cols:
                raise ValueError(f"row {i} has {len(vals)} values, expected {2 * cols}")
            out[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return out
