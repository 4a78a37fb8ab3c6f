"""
Parameter-shift derivatives of model values, density matrices and state vectors
"""

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from qfibound.circuit.model import as_features, evolve, evolve_pure, z_expectations
from qfibound.circuit.spec import CircuitSpec, check_theta
from qfibound.gradients import LOGGER
from qfibound.util.errors import NumericalError

SHIFT = np.pi / 2.0
STATE_SHIFT = np.pi
FD_STEP = 1e-5


@dataclass(frozen=True)
class GradientVector:
    """
    Gradient with respect to the parameters start..start+len(values)-1.
    """
    values: np.ndarray
    start: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            LOGGER.error("Non-finite gradient entries: %s", values)
            raise NumericalError("gradient has non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def with_respect_to(self) -> range:
        return range(self.start, self.start + len(self.values))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _check_index(j: int, spec: CircuitSpec):
    if not 0 <= j < spec.d:
        raise ValueError(f"parameter index {j} out of range for d = {spec.d}")


def shifted_thetas(theta: np.ndarray, shift: float) -> np.ndarray:
    """
    Stack of theta + shift e_j for every j, followed by theta - shift e_j for every j.

    Returns:
        np.ndarray: Array of shape (2d, d).
    """
    offsets = shift * np.eye(theta.shape[0])
    return np.concatenate([theta + offsets, theta - offsets])


def param_shift_grad(x, theta, spec: CircuitSpec, j: int) -> float:
    """
    (f(theta + pi/2 e_j) - f(theta - pi/2 e_j)) / 2 for the noisy model value f.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit.
        j (int): Parameter index.

    Raises:
        ValueError: If j is out of range.

    Returns:
        float: The partial derivative.
    """
    theta = check_theta(theta, spec)
    _check_index(j, spec)
    offset = np.zeros(spec.d)
    offset[j] = SHIFT
    values = z_expectations(evolve(as_features(x)[:1], np.stack([theta + offset, theta - offset]), spec), spec)
    return float((values[0, 0] - values[1, 0]) / 2.0)


def model_gradients(features, theta, spec: CircuitSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Model values and full parameter-shift gradients over a batch.

    Args:
        features: (B, m) batch.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit.

    Returns:
        tuple: values of shape (B,) and gradients of shape (B, d).
    """
    theta = check_theta(theta, spec)
    stack = np.concatenate([theta[None], shifted_thetas(theta, SHIFT)])
    values = z_expectations(evolve(features, stack, spec), spec)
    d = spec.d
    gradients = (values[1:d + 1] - values[d + 1:]) / 2.0
    return values[0], gradients.T


def param_shift_gradient(x, theta, spec: CircuitSpec) -> GradientVector:
    """Full parameter-shift gradient of the model value at one input."""
    _, gradients = model_gradients(as_features(x)[:1], theta, spec)
    return GradientVector(gradients[0])


def finite_diff_grad(f: Callable[[np.ndarray], float], theta, h: float = FD_STEP) -> GradientVector:
    """
    Central differences (f(theta + h e_j) - f(theta - h e_j)) / 2h.

    Args:
        f (Callable): Real-valued function of the parameters.
        theta: Point of evaluation.
        h (float, optional): Step. Defaults to 1e-5.

    Raises:
        ValueError: If h is not positive.

    Returns:
        GradientVector: The estimate.
    """
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    theta = np.asarray(theta, dtype=float)
    grad = np.empty(theta.shape[0])
    for j in range(theta.shape[0]):
        step = np.zeros_like(theta)
        step[j] = h
        grad[j] = (f(theta + step) - f(theta - step)) / (2.0 * h)
    return GradientVector(grad)


def density_derivatives(features, theta, spec: CircuitSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Noisy output states and all their parameter-shift derivatives over a batch.

    Args:
        features: (B, m) batch.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit.

    Returns:
        tuple: rho of shape (B, D, D) and d rho / d theta_j of shape (d, B, D, D).
    """
    theta = check_theta(theta, spec)
    stack = np.concatenate([theta[None], shifted_thetas(theta, SHIFT)])
    matrices = evolve(features, stack, spec)
    d = spec.d
    return matrices[0], (matrices[1:d + 1] - matrices[d + 1:]) / 2.0


def density_derivative(x, theta, spec: CircuitSpec, j: int) -> np.ndarray:
    """
    d rho~ / d theta_j = (rho~(theta + pi/2 e_j) - rho~(theta - pi/2 e_j)) / 2.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit.
        j (int): Parameter index.

    Raises:
        ValueError: If j is out of range.

    Returns:
        np.ndarray: Traceless Hermitian matrix.
    """
    theta = check_theta(theta, spec)
    _check_index(j, spec)
    offset = np.zeros(spec.d)
    offset[j] = SHIFT
    matrices = evolve(as_features(x)[:1], np.stack([theta + offset, theta - offset]), spec)
    return (matrices[0, 0] - matrices[1, 0]) / 2.0


def state_derivatives(features, theta, spec: CircuitSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Noiseless output states and their exact derivatives (psi(theta + pi e_j) - psi(theta - pi e_j)) / 4.

    Returns:
        tuple: psi of shape (B, D) and d psi / d theta_j of shape (d, B, D).
    """
    theta = check_theta(theta, spec)
    stack = np.concatenate([theta[None], shifted_thetas(theta, STATE_SHIFT)])
    states = evolve_pure(features, stack, spec)
    d = spec.d
    return states[0], (states[1:d + 1] - states[d + 1:]) / 4.0


def state_derivative(x, theta, spec: CircuitSpec, j: int) -> np.ndarray:
    """Exact derivative of the noiseless state vector with respect to theta_j."""
    _check_index(j, spec)
    _, derivatives = state_derivatives(as_features(x)[:1], theta, spec)
    return derivatives[j, 0]
