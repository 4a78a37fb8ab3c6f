"""
Fisher matrix container
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from qfibound.fisher import LOGGER
from qfibound.linalg.tensor import hermitian_eig
from qfibound.util.errors import NumericalError

SYMMETRY_TOL = 1e-9
PSD_EIGEN_TOL = 1e-8


class FisherKind(Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


@dataclass(frozen=True)
class FisherMatrix:
    """
    Real symmetric d x d Fisher information matrix with the point it was evaluated at.
    """
    kind: FisherKind
    matrix: np.ndarray
    theta: np.ndarray = field(default=None, repr=False)
    noise_rate: float = 0.0
    n_samples: int = 1

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Fisher matrix must be square, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NumericalError("Fisher matrix has non-finite entries")
        asymmetry = np.max(np.abs(matrix - matrix.T), initial=0.0)
        if asymmetry > SYMMETRY_TOL:
            raise NumericalError(f"Fisher matrix is not symmetric (deviation {asymmetry})")
        matrix = 0.5 * (matrix + matrix.T)
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """
        Ascending spectrum.

        Raises:
            NumericalError: If an eigenvalue lies below -1e-8.
        """
        values, _ = hermitian_eig(self.matrix)
        if values[0] < -PSD_EIGEN_TOL:
            LOGGER.error("%s Fisher matrix has eigenvalue %s", self.kind.value, values[0])
            raise NumericalError(f"Fisher matrix is not positive semidefinite (eigenvalue {values[0]})")
        values.flags.writeable = False
        return values

    def descending(self) -> np.ndarray:
        return self.eigenvalues[::-1]
