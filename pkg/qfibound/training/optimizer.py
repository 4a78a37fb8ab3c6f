"""
Natural gradient step with a pseudo-inverted Fisher matrix
"""

import numpy as np

from qfibound.circuit.spec import THETA_BOUND
from qfibound.fisher.matrix import FisherMatrix
from qfibound.linalg.tensor import pseudo_inverse
from qfibound.training import LOGGER


def natural_gradient_step(theta, grad, fisher: FisherMatrix, lr: float, cutoff: float) -> np.ndarray:
    """
    theta' = clip(theta - lr * pinv(F, cutoff) grad) to [-2pi, 2pi].

    Args:
        theta: Current parameters.
        grad: Loss gradient at theta.
        fisher (FisherMatrix): Batch-averaged QFIM at theta.
        lr (float): Learning rate.
        cutoff (float): Pseudo-inverse eigenvalue cutoff.

    Raises:
        ValueError: On mismatched dimensions.

    Returns:
        np.ndarray: Updated parameters.
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if theta.shape != grad.shape or fisher.d != theta.shape[0]:
        raise ValueError(f"dimension mismatch: theta {theta.shape}, grad {grad.shape}, fisher {fisher.matrix.shape}")
    direction = pseudo_inverse(fisher.matrix, cutoff) @ grad
    LOGGER.debug("Natural gradient step of norm %.6g", lr * np.linalg.norm(direction))
    return np.clip(theta - lr * direction, -THETA_BOUND, THETA_BOUND)
