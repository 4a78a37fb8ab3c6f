"""
Classical Fisher information of the two-outcome measurement
"""

from typing import Callable, Tuple

import numpy as np

from qfibound import PROB_FLOOR
from qfibound.circuit.model import as_features
from qfibound.circuit.spec import CircuitSpec
from qfibound.fisher import LOGGER
from qfibound.fisher.matrix import FisherKind, FisherMatrix
from qfibound.gradients.param_shift import model_gradients


def _outcomes(x, theta, spec: CircuitSpec):
    values, gradients = model_gradients(as_features(x)[:1], theta, spec)
    f = float(values[0])
    grad = gradients[0]
    # p(+1) = (1 + f) / 2 and p(-1) = (1 - f) / 2
    return ((1.0 + f) / 2.0, grad / 2.0), ((1.0 - f) / 2.0, -grad / 2.0)


def cfim(x, theta, spec: CircuitSpec, prob_floor: float = PROB_FLOOR) -> FisherMatrix:
    """
    F_ij = sum over y of (d_i p_y)(d_j p_y) / p_y, with p_y floored at prob_floor.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit, evaluated at its own noise rate.
        prob_floor (float, optional): Probability floor. Defaults to 1e-12.

    Returns:
        FisherMatrix: Classical Fisher information.
    """
    matrix = np.zeros((spec.d, spec.d))
    for probability, derivative in _outcomes(x, theta, spec):
        matrix += np.outer(derivative, derivative) / max(probability, prob_floor)
    return FisherMatrix(FisherKind.CLASSICAL, matrix, np.asarray(theta, dtype=float), spec.noise_rate)


def noisy_cfim_scaled(x, theta, spec: CircuitSpec, eta: Callable[[float], float],
                      eta_prime: Callable[[float], float], prob_floor: float = PROB_FLOOR) -> FisherMatrix:
    """
    Noisy Fisher information from noiseless probabilities p through a perturbation eta:
    F~_ij = sum over y of eta'(p_y)**2 / eta(p_y) (d_i p_y)(d_j p_y).

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector.
        spec (CircuitSpec): Circuit. Its noise rate is ignored.
        eta (Callable): Noisy probability as a function of the noiseless one.
        eta_prime (Callable): Derivative of eta.
        prob_floor (float, optional): Floor on eta(p). Defaults to 1e-12.

    Raises:
        ValueError: If eta(p_y) <= 0 for an outcome.

    Returns:
        FisherMatrix: Classical Fisher information of the perturbed model.
    """
    noiseless = spec.with_noise(0.0)
    matrix = np.zeros((spec.d, spec.d))
    for probability, derivative in _outcomes(x, theta, noiseless):
        perturbed = float(eta(probability))
        if perturbed <= 0.0:
            LOGGER.error("eta(%s) = %s is not positive", probability, perturbed)
            raise ValueError(f"eta must be positive, got eta({probability}) = {perturbed}")
        scale = float(eta_prime(probability)) ** 2 / max(perturbed, prob_floor)
        matrix += scale * np.outer(derivative, derivative)
    return FisherMatrix(FisherKind.CLASSICAL, matrix, np.asarray(theta, dtype=float), spec.noise_rate)


def depolarizing_eta(p: float, k0: int) -> Tuple[Callable[[float], float], Callable[[float], float]]:
    """
    eta(u) = (1-p)**k0 (u - 1/2) + 1/2, the measured-outcome probability after k0
    depolarizing channels, and its constant derivative.

    Returns:
        tuple: (eta, eta_prime).
    """
    factor = (1.0 - p) ** k0
    return (lambda u: factor * (u - 0.5) + 0.5), (lambda u: factor)
