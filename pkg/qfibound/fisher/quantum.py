"""
Quantum Fisher information: pure-state form, mixed-state SLD form and batch averages
"""

import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from qfibound import DET_FLOOR, SLD_FLOOR
from qfibound.circuit.model import as_features, z_expectations
from qfibound.circuit.spec import CircuitSpec, check_theta
from qfibound.fisher import LOGGER
from qfibound.fisher.matrix import FisherKind, FisherMatrix
from qfibound.gradients.param_shift import density_derivatives, state_derivatives
from qfibound.linalg.tensor import dagger, hermitian_eig, log_sqrt_det_from_spectrum


def qfim_pure(x, theta, spec: CircuitSpec) -> FisherMatrix:
    """
    F_ij = 4 Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>] of the noiseless state.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector.
        spec (CircuitSpec): Noiseless circuit.

    Raises:
        ValueError: If the circuit is noisy.

    Returns:
        FisherMatrix: Quantum Fisher information.
    """
    if spec.noise_rate > 0.0:
        raise ValueError("qfim_pure needs a noiseless circuit, use qfim_mixed for p > 0")
    states, derivatives = state_derivatives(as_features(x)[:1], theta, spec)
    psi = states[0]
    dpsi = derivatives[:, 0, :]
    overlaps = np.conj(dpsi) @ dpsi.T
    projections = np.conj(dpsi) @ psi
    matrix = 4.0 * np.real(overlaps - np.outer(projections, np.conj(projections)))
    return FisherMatrix(FisherKind.QUANTUM, matrix, np.asarray(theta, dtype=float), 0.0)


def _sld_weights(values: np.ndarray, sld_floor: float) -> np.ndarray:
    """1 / (l_k + l_l) where l_k + l_l exceeds the floor, zero elsewhere."""
    sums = values[..., :, None] + values[..., None, :]
    keep = sums > sld_floor
    return np.where(keep, 1.0 / np.where(keep, sums, 1.0), 0.0)


def mixed_qfims(matrices: np.ndarray, derivatives: np.ndarray, sld_floor: float = SLD_FLOOR) -> np.ndarray:
    """
    Per-sample SLD quantum Fisher matrices.

    Args:
        matrices (np.ndarray): States of shape (B, D, D).
        derivatives (np.ndarray): Derivatives of shape (d, B, D, D).
        sld_floor (float, optional): Eigenvalue-pair cutoff. Defaults to 1e-10.

    Returns:
        np.ndarray: Matrices of shape (B, d, d).
    """
    values, vectors = hermitian_eig(matrices)
    rotated = dagger(vectors)[None] @ derivatives @ vectors[None]
    weights = _sld_weights(values, sld_floor)
    qfims = 2.0 * np.real(np.einsum("ibkl,jblk,bkl->bij", rotated, rotated, weights, optimize=True))
    return 0.5 * (qfims + np.swapaxes(qfims, -1, -2))


def qfim_mixed(x, theta, spec: CircuitSpec, sld_floor: float = SLD_FLOOR) -> FisherMatrix:
    """
    Quantum Fisher information of the noisy state through its symmetric logarithmic derivative.

    Pairs of eigenvalues with l_k + l_l below sld_floor contribute nothing.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit at any noise rate in [0, 1).
        sld_floor (float, optional): Eigenvalue-pair cutoff. Defaults to 1e-10.

    Returns:
        FisherMatrix: Quantum Fisher information.
    """
    matrices, derivatives = density_derivatives(as_features(x)[:1], theta, spec)
    return FisherMatrix(FisherKind.QUANTUM, mixed_qfims(matrices, derivatives, sld_floor)[0],
                        np.asarray(theta, dtype=float), spec.noise_rate)


def symmetric_log_derivative(rho: np.ndarray, drho: np.ndarray, sld_floor: float = SLD_FLOOR) -> np.ndarray:
    """
    Operator L with d rho = (L rho + rho L) / 2 on the support of rho.

    Args:
        rho (np.ndarray): Density matrix.
        drho (np.ndarray): Its derivative.
        sld_floor (float, optional): Eigenvalue-pair cutoff. Defaults to 1e-10.

    Returns:
        np.ndarray: Hermitian SLD.
    """
    values, vectors = hermitian_eig(rho)
    rotated = dagger(vectors) @ drho @ vectors
    return vectors @ (2.0 * rotated * _sld_weights(values, sld_floor)) @ dagger(vectors)


@dataclass(frozen=True)
class Geometry:
    """
    Batch-averaged QFIM at one parameter point with the model values and gradients it shares inputs with.
    """
    qfim: FisherMatrix
    values: np.ndarray
    gradients: np.ndarray

    def max_gradient_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.gradients, axis=1)))


def local_geometry(features, theta, spec: CircuitSpec, sld_floor: float = SLD_FLOOR) -> Geometry:
    """
    Batch-averaged mixed QFIM, model values and gradients from one set of density derivatives.

    Args:
        features: (B, m) batch.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit.
        sld_floor (float, optional): Eigenvalue-pair cutoff. Defaults to 1e-10.

    Returns:
        Geometry: The averaged QFIM, values of shape (B,) and gradients of shape (B, d).
    """
    theta = check_theta(theta, spec)
    matrices, derivatives = density_derivatives(features, theta, spec)
    qfims = mixed_qfims(matrices, derivatives, sld_floor)
    qfim = FisherMatrix(FisherKind.QUANTUM, qfims.mean(axis=0), theta, spec.noise_rate, qfims.shape[0])
    values = z_expectations(matrices, spec)
    gradients = z_expectations(derivatives, spec).T
    return Geometry(qfim, values, gradients)


def batch_qfim(features, theta, spec: CircuitSpec, sld_floor: float = SLD_FLOOR) -> FisherMatrix:
    """Arithmetic mean of the per-sample mixed QFIMs over a batch."""
    return local_geometry(features, theta, spec, sld_floor).qfim


class QfimLandscape:
    """
    Batch-averaged QFIM of a circuit over a fixed batch, evaluated lazily and cached by theta.
    """

    CACHE_SIZE = 16

    def __init__(self, spec: CircuitSpec, features, det_floor: float = DET_FLOOR):
        self.spec = spec
        self.features = np.ascontiguousarray(as_features(features))
        self.det_floor = det_floor
        self._lock = threading.Lock()
        self._cache = OrderedDict()

    def geometry(self, theta) -> Geometry:
        theta = np.ascontiguousarray(check_theta(theta, self.spec))
        key = theta.tobytes()
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                return self._cache[key]
        result = local_geometry(self.features, theta, self.spec)
        LOGGER.debug("QFIM evaluated at a new point (batch %s)", self.features.shape[0])
        with self._lock:
            self._cache[key] = result
            while len(self._cache) > self.CACHE_SIZE:
                self._cache.popitem(last=False)
        return result

    def log_sqrt_det(self, theta) -> float:
        """Floored log sqrt det of the averaged QFIM."""
        return log_sqrt_det_from_spectrum(self.geometry(theta).qfim.eigenvalues, self.det_floor)

    def log_min_eigenvalue(self, theta) -> float:
        """Log of the smallest eigenvalue of the averaged QFIM, floored."""
        return float(np.log(max(self.geometry(theta).qfim.eigenvalues[0], self.det_floor)))

    def max_gradient_norm(self, theta) -> float:
        """Largest model-gradient norm over the batch."""
        return self.geometry(theta).max_gradient_norm()

    def __repr__(self):
        return f"QfimLandscape(d={self.spec.d}, batch={self.features.shape[0]}, p={self.spec.noise_rate})"

