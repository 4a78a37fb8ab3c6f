"""
Unitary evolution and Kraus channels, including depolarizing noise
"""

from functools import lru_cache
from typing import List, Sequence, Union

import numpy as np

from qfibound import UNITARY_TOL
from qfibound.linalg.tensor import dagger
from qfibound.quantum import LOGGER
from qfibound.quantum.gates import pauli_string, pauli_strings
from qfibound.quantum.states import DensityMatrix

COMPLETENESS_TOL = 1e-9


class KrausChannel:
    """
    Completely positive trace-preserving map given by its Kraus operators.
    """

    def __init__(self, operators: Sequence[np.ndarray], noise_rate: float = 0.0):
        if len(operators) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        stacked = np.stack([np.asarray(op, dtype=np.complex128) for op in operators])
        if stacked.ndim != 3 or stacked.shape[1] != stacked.shape[2]:
            raise ValueError("Kraus operators must be square matrices of one dimension")
        completeness = np.einsum("kji,kjl->il", np.conj(stacked), stacked)
        deviation = np.max(np.abs(completeness - np.eye(stacked.shape[1])))
        if deviation > COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators are not complete (deviation {deviation})")
        stacked.flags.writeable = False
        self.operators = stacked
        self.noise_rate = float(noise_rate)

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    def __len__(self):
        return self.operators.shape[0]

    def __repr__(self):
        return f"KrausChannel(operators={len(self)}, dim={self.dim}, noise_rate={self.noise_rate})"


def _check_rate(p: float):
    if not 0.0 <= p < 1.0:
        raise ValueError(f"noise rate must be in [0, 1), got {p}")


@lru_cache(maxsize=None)
def _depolarizing(p: float, targets: tuple, n_qubits: int) -> KrausChannel:
    weight = 4 ** len(targets)
    operators: List[np.ndarray] = []
    for labels in pauli_strings(len(targets)):
        full = ["I"] * n_qubits
        for qubit, label in zip(targets, labels):
            full[qubit] = label
        if set(labels) == {"I"}:
            scale = np.sqrt(1.0 - p * (weight - 1) / weight)
        else:
            scale = np.sqrt(p / weight)
        operators.append(scale * pauli_string("".join(full)))
    return KrausChannel(operators, noise_rate=p)


def depolarizing(p: float, target_qubits: Union[int, Sequence[int]], n_qubits: int) -> KrausChannel:
    """
    Depolarizing channel rho -> (1-p) rho + p Tr_S(rho) x I_S / 2**|S| on the target qubits S.

    With a single target the Kraus set is sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z.

    Args:
        p (float): Noise rate in [0, 1).
        target_qubits (int | Sequence[int]): Target qubit or qubits.
        n_qubits (int): Register size.

    Raises:
        ValueError: If p is outside [0, 1) or the targets are invalid.

    Returns:
        KrausChannel: The channel, cached per (p, targets, n_qubits).
    """
    _check_rate(p)
    targets = (target_qubits,) if isinstance(target_qubits, (int, np.integer)) else tuple(target_qubits)
    if len(targets) == 0 or len(set(targets)) != len(targets):
        raise ValueError(f"invalid target qubits {targets}")
    if any(not 0 <= int(qubit) < n_qubits for qubit in targets):
        raise ValueError(f"target qubits {targets} out of range for {n_qubits} qubits")
    return _depolarizing(float(p), tuple(int(qubit) for qubit in targets), int(n_qubits))


def conjugate(matrices: np.ndarray, u: np.ndarray) -> np.ndarray:
    """U rho U^dagger, broadcast over leading axes of both arguments."""
    return u @ matrices @ dagger(u)


def kraus_sum(matrices: np.ndarray, operators: np.ndarray) -> np.ndarray:
    """Sum over k of K rho K^dagger, broadcast over the leading axes of rho."""
    return np.einsum("kij,...jl,kml->...im", operators, matrices, np.conj(operators), optimize=True)


def apply_unitary(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    """
    Returns U rho U^dagger.

    Args:
        rho (DensityMatrix): Input state.
        u (np.ndarray): Unitary of matching dimension.

    Raises:
        ValueError: If u is not unitary within 1e-9 or the dimensions differ.

    Returns:
        DensityMatrix: The evolved state.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != rho.matrix.shape:
        raise ValueError(f"unitary of shape {u.shape} does not act on a state of shape {rho.matrix.shape}")
    deviation = np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0])))
    if deviation > UNITARY_TOL:
        LOGGER.error("Rejected non-unitary gate (deviation %s)", deviation)
        raise ValueError(f"matrix is not unitary (deviation {deviation})")
    return DensityMatrix(conjugate(rho.matrix, u), check=False)


def apply_channel(rho: DensityMatrix, channel: KrausChannel) -> DensityMatrix:
    """
    Returns the Kraus sum applied to rho.

    Args:
        rho (DensityMatrix): Input state.
        channel (KrausChannel): Channel of matching dimension.

    Raises:
        ValueError: If the dimensions differ.

    Returns:
        DensityMatrix: The output state.
    """
    if channel.dim != rho.dim:
        raise ValueError(f"channel of dimension {channel.dim} does not act on a state of dimension {rho.dim}")
    return DensityMatrix(kraus_sum(rho.matrix, channel.operators), check=False)
