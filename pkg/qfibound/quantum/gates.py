"""
Closed-form single-qubit rotations, CNOTs and Pauli strings
"""

import itertools
from functools import lru_cache
from typing import List, Sequence

import numpy as np

from qfibound.linalg.tensor import kron

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def rx(theta) -> np.ndarray:
    """
    RX(theta) = exp(-i theta X / 2), vectorised over an array of angles.

    Args:
        theta (float | np.ndarray): Rotation angle(s) in radians.

    Returns:
        np.ndarray: Gate(s) of shape (..., 2, 2).
    """
    half = np.asarray(theta, dtype=float) / 2.0
    c = np.cos(half)
    s = np.sin(half)
    out = np.empty(half.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * s
    out[..., 1, 0] = -1j * s
    out[..., 1, 1] = c
    return out


def ry(theta) -> np.ndarray:
    """RY(theta) = exp(-i theta Y / 2), vectorised over an array of angles."""
    half = np.asarray(theta, dtype=float) / 2.0
    c = np.cos(half)
    s = np.sin(half)
    out = np.empty(half.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def rz(theta) -> np.ndarray:
    """RZ(theta) = exp(-i theta Z / 2), vectorised over an array of angles."""
    half = np.asarray(theta, dtype=float) / 2.0
    out = np.zeros(half.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = np.exp(-1j * half)
    out[..., 1, 1] = np.exp(1j * half)
    return out


def rot(alpha, beta, gamma) -> np.ndarray:
    """
    Euler rotation RZ(gamma) RY(beta) RZ(alpha).

    Args:
        alpha (float | np.ndarray): First Z angle.
        beta (float | np.ndarray): Y angle.
        gamma (float | np.ndarray): Last Z angle.

    Returns:
        np.ndarray: Gate(s) of shape (..., 2, 2).
    """
    return rz(gamma) @ ry(beta) @ rz(alpha)


def embed(gate: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """
    Lifts a single-qubit gate onto n qubits. Qubit 0 is the leftmost tensor factor.

    Args:
        gate (np.ndarray): Gate or stack of gates of shape (..., 2, 2).
        qubit (int): Target qubit.
        n_qubits (int): Register size.

    Returns:
        np.ndarray: Gate(s) of shape (..., 2**n, 2**n).
    """
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    gate = np.asarray(gate)
    factors = [np.broadcast_to(I2, gate.shape) for _ in range(n_qubits)]
    factors[qubit] = gate
    return kron_all(factors)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence of factors, left to right."""
    result = factors[0]
    for factor in factors[1:]:
        result = kron(result, factor)
    return result


@lru_cache(maxsize=None)
def cnot(control: int, target: int, n_qubits: int) -> np.ndarray:
    """
    CNOT on an n-qubit register built from projectors on the control.

    Args:
        control (int): Control qubit.
        target (int): Target qubit.
        n_qubits (int): Register size.

    Returns:
        np.ndarray: Read-only unitary of dimension 2**n.
    """
    if control == target:
        raise ValueError("control and target must differ")
    idle = [I2] * n_qubits
    off = list(idle)
    off[control] = P0
    on = list(idle)
    on[control] = P1
    on[target] = X
    gate = kron_all(off) + kron_all(on)
    gate.flags.writeable = False
    return gate


@lru_cache(maxsize=None)
def ring_entangler(n_qubits: int) -> np.ndarray:
    """
    CNOT(q -> q+1 mod n) for q = 0..n-1, applied in order. Identity for one qubit.

    Args:
        n_qubits (int): Register size.

    Returns:
        np.ndarray: Read-only unitary of dimension 2**n.
    """
    dim = 2 ** n_qubits
    gate = np.eye(dim, dtype=np.complex128)
    if n_qubits > 1:
        for control in range(n_qubits):
            gate = cnot(control, (control + 1) % n_qubits, n_qubits) @ gate
    gate.flags.writeable = False
    return gate


def pauli_string(labels: str) -> np.ndarray:
    """Tensor product of Paulis named by a string such as "ZI"."""
    return kron_all([PAULIS[label] for label in labels])


@lru_cache(maxsize=None)
def pauli_strings(n_qubits: int) -> List[str]:
    """All 4**n Pauli labels on n qubits, identity first."""
    return ["".join(labels) for labels in itertools.product("IXYZ", repeat=n_qubits)]


@lru_cache(maxsize=None)
def z_on(qubit: int, n_qubits: int) -> np.ndarray:
    """Z on one qubit, identity elsewhere."""
    gate = np.array(embed(Z, qubit, n_qubits))
    gate.flags.writeable = False
    return gate
