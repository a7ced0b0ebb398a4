"""Ideal gate matrices, register embedding and fidelity metrics.

All gates are dense complex matrices over the lexicographic basis
(spin/wire 1 = most significant bit).  Registers here stay small (n <= 6),
so clarity wins over sparse or tensor-network representations.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ID2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "lambda_not",
    "modified_lambda_not",
    "x_power",
    "rotation",
    "controlled",
    "embed",
    "gate_fidelity",
    "phase_stripped_fidelity",
    "is_unitary",
    "ensure_unitary",
]

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULIS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def ensure_unitary(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise ValueError("matrix is not unitary within tolerance")
    return u


def lambda_not(n_controls: int) -> np.ndarray:
    """Multi-controlled NOT on n_controls + 1 qubits (target last).

    The matrix is identity except for the bottom 2x2 block, which swaps the
    last two basis states |1...10> and |1...11>.  n_controls = 0 degenerates
    to a plain NOT, 1 gives CNOT, 2 the Toffoli gate.
    """
    if n_controls < 0:
        raise ValueError("n_controls must be >= 0")
    d = 2 ** (n_controls + 1)
    u = np.eye(d, dtype=complex)
    u[d - 2:, d - 2:] = SIGMA_X
    return u


def modified_lambda_not(n_controls: int) -> np.ndarray:
    """Phase-modified multi-controlled NOT: bottom block -i*sigma_x.

    Equals exp(-i (pi/2) P x sigma_x) with P the projector onto all
    controls |1>; it differs from lambda_not only by the -i phase on the
    flipped pair of states.
    """
    if n_controls < 1:
        raise ValueError("n_controls must be >= 1")
    d = 2 ** (n_controls + 1)
    u = np.eye(d, dtype=complex)
    u[d - 2:, d - 2:] = -1j * SIGMA_X
    return u


def x_power(exponent: float) -> np.ndarray:
    """Principal power of sigma_x: X^p = P+ + e^{i pi p} P-.

    x_power(0.5) is the square root of NOT; x_power(0.25)**4 = sigma_x.
    """
    plus = 0.5 * (ID2 + SIGMA_X)
    minus = 0.5 * (ID2 - SIGMA_X)
    return plus + np.exp(1j * np.pi * exponent) * minus


def rotation(axis: str, angle: float) -> np.ndarray:
    """exp(-i * angle * sigma_axis / 2) for axis in {x, y, z}."""
    try:
        sigma = _PAULIS[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}") from None
    return np.cos(angle / 2) * ID2 - 1j * np.sin(angle / 2) * sigma


def controlled(u: np.ndarray) -> np.ndarray:
    """Controlled single-qubit gate diag(I2, u), control = first qubit."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("controlled() expects a 2x2 gate")
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


def embed(gate: np.ndarray, wires, n: int) -> np.ndarray:
    """Embed a gate acting on the listed wires into an n-qubit register.

    ``wires`` maps the gate's own qubits (most significant first) to
    register spins, 1-based.  The result acts as the gate on those spins
    and as identity elsewhere.
    """
    gate = np.asarray(gate, dtype=complex)
    wires = list(wires)
    k = len(wires)
    if gate.shape != (2 ** k, 2 ** k):
        raise ValueError(
            f"gate of shape {gate.shape} does not match {k} wires"
        )
    if len(set(wires)) != k:
        raise ValueError(f"duplicate wires in {wires}")
    for w in wires:
        if not 1 <= w <= n:
            raise ValueError(f"wire {w} out of range 1..{n}")

    d = 2 ** n
    out = np.zeros((d, d), dtype=complex)
    shifts = [n - w for w in wires]  # bit position of each wire in the index
    rest_mask = (d - 1) ^ sum(1 << s for s in shifts)
    for col in range(d):
        sub_col = 0
        for s in shifts:
            sub_col = (sub_col << 1) | ((col >> s) & 1)
        base = col & rest_mask
        for sub_row in range(2 ** k):
            amp = gate[sub_row, sub_col]
            if amp == 0:
                continue
            row = base
            for pos, s in enumerate(shifts):
                if (sub_row >> (k - 1 - pos)) & 1:
                    row |= 1 << s
            out[row, col] = amp
    return out


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|tr(U^dag V)| / d, invariant under a global phase of either gate."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    d = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) / d)


def phase_stripped_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Fidelity after removing the best diagonal phases from u.

    Maximizing |tr((D u)^dag v)| over diagonal unitaries D gives
    sum_j |(v u^dag)_jj| / d in closed form.  Useful when two gates agree
    up to per-basis-state phases, e.g. a pulse-realized gate that picked up
    free-evolution phases.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    d = u.shape[0]
    return float(np.sum(np.abs(np.diagonal(v @ u.conj().T))) / d)
