"""
Mean-square-error loss, its [0, 1] rescaling and its parameter-shift gradient
"""

from dataclasses import dataclass

import numpy as np

from qfibound.circuit.model import as_features, model_values
from qfibound.circuit.spec import CircuitSpec
from qfibound.gradients.param_shift import GradientVector, model_gradients


@dataclass(frozen=True)
class Batch:
    """
    Scaled features with labels in {-1, +1}.
    """
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float).reshape(-1)
        if labels.size == 0:
            raise ValueError("batch is empty")
        features = as_features(self.features)
        if features.shape[0] != labels.size:
            raise ValueError(f"{features.shape[0]} feature rows for {labels.size} labels")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.labels.size


def mse_from_values(values: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean((labels - values) ** 2))


def mse_loss(theta, batch: Batch, spec: CircuitSpec) -> float:
    """
    Mean of (y - f(x))**2 over the batch.

    Args:
        theta: Parameter vector.
        batch (Batch): Data.
        spec (CircuitSpec): Circuit, evaluated at its noise rate.

    Returns:
        float: Loss in [0, 4].
    """
    return mse_from_values(model_values(batch.features, theta, spec)[0], batch.labels)


def bounded_loss(theta, batch: Batch, spec: CircuitSpec) -> float:
    """Mean of ((y - f(x)) / 2)**2, the mse loss divided by four, in [0, 1]."""
    return mse_loss(theta, batch, spec) / 4.0


def gradient_from_values(values: np.ndarray, gradients: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Mean of 2 (f - y) grad f over the batch."""
    return np.mean(2.0 * (values - labels)[:, None] * gradients, axis=0)


def loss_gradient(theta, batch: Batch, spec: CircuitSpec) -> GradientVector:
    """
    Gradient of the mse loss with model gradients from the parameter-shift rule.

    Args:
        theta: Parameter vector.
        batch (Batch): Data.
        spec (CircuitSpec): Circuit.

    Returns:
        GradientVector: The gradient.
    """
    values, gradients = model_gradients(batch.features, theta, spec)
    return GradientVector(gradient_from_values(values, gradients, batch.labels))
