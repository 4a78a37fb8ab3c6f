"""
Pure and mixed n-qubit states
"""

import numpy as np

from qfibound import HERMITIAN_TOL
from qfibound.linalg.tensor import hermitian_eig, is_hermitian
from qfibound.quantum import LOGGER

NORM_TOL = 1e-10
EIGEN_TOL = 1e-10


def _qubits_for(dim: int) -> int:
    n_qubits = int(round(np.log2(dim))) if dim > 0 else 0
    if n_qubits < 1 or 2 ** n_qubits != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n_qubits


class PureState:
    """
    State vector of an n-qubit register.
    """

    def __init__(self, amplitudes: np.ndarray, check: bool = True):
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if self.amplitudes.ndim != 1:
            raise ValueError("amplitudes must be a vector")
        self.n_qubits = _qubits_for(self.amplitudes.shape[0])
        if check:
            norm = float(np.sum(np.abs(self.amplitudes) ** 2))
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state is not normalised (norm {norm})")

    @classmethod
    def zero(cls, n_qubits: int) -> "PureState":
        """Returns |0...0>."""
        amplitudes = np.zeros(2 ** n_qubits, dtype=np.complex128)
        amplitudes[0] = 1.0
        return cls(amplitudes)

    def density_matrix(self) -> "DensityMatrix":
        """Returns |psi><psi|."""
        return DensityMatrix(np.outer(self.amplitudes, np.conj(self.amplitudes)))

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits})"


class DensityMatrix:
    """
    Density operator of an n-qubit register.
    """

    def __init__(self, matrix: np.ndarray, check: bool = True):
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("density matrix must be square")
        self.n_qubits = _qubits_for(self.matrix.shape[0])
        if check:
            self.validate()

    def validate(self):
        """
        Checks Hermiticity, unit trace and positivity within tolerance.

        Raises:
            ValueError: If any invariant is violated.
        """
        if not is_hermitian(self.matrix, HERMITIAN_TOL):
            raise ValueError("density matrix is not Hermitian")
        trace = np.trace(self.matrix).real
        if abs(trace - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {trace}, expected 1")
        values, _ = hermitian_eig(self.matrix)
        if values[0] < -EIGEN_TOL:
            LOGGER.error("Density matrix has eigenvalue %s", values[0])
            raise ValueError(f"density matrix has negative eigenvalue {values[0]}")

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        """Returns I / 2**n."""
        dim = 2 ** n_qubits
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eig(self.matrix)[0]

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits})"
