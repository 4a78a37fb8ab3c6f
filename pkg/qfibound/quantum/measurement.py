"""
POVMs, outcome probabilities and observable expectations
"""

from typing import Dict, Hashable

import numpy as np

from qfibound import HERMITIAN_TOL
from qfibound.linalg.tensor import hermitian_eig, is_hermitian, kron
from qfibound.quantum import LOGGER
from qfibound.quantum.gates import P0, P1, z_on
from qfibound.quantum.states import DensityMatrix

POVM_TOL = 1e-9
IMAG_TOL = 1e-9
CLAMP_TOL = 1e-10


class Povm:
    """
    Label-indexed set of positive operators summing to the identity.
    """

    def __init__(self, elements: Dict[Hashable, np.ndarray]):
        if not elements:
            raise ValueError("a POVM needs at least one element")
        self.elements = {label: np.asarray(m, dtype=np.complex128) for label, m in elements.items()}
        dims = {m.shape for m in self.elements.values()}
        if len(dims) != 1:
            raise ValueError(f"POVM elements have mixed shapes {dims}")
        total = sum(self.elements.values())
        for label, m in self.elements.items():
            if not is_hermitian(m, HERMITIAN_TOL) or hermitian_eig(m)[0][0] < -POVM_TOL:
                raise ValueError(f"POVM element {label!r} is not positive semidefinite")
        deviation = np.max(np.abs(total - np.eye(total.shape[0])))
        if deviation > POVM_TOL:
            raise ValueError(f"POVM elements do not sum to the identity (deviation {deviation})")

    @property
    def labels(self):
        return list(self.elements)

    def __getitem__(self, label):
        return self.elements[label]

    def __contains__(self, label):
        return label in self.elements


def computational_povm(n_qubits: int, qubit: int = 0) -> Povm:
    """
    Two-outcome measurement of one qubit: +1 for |0>, -1 for |1>.

    Args:
        n_qubits (int): Register size.
        qubit (int, optional): Measured qubit. Defaults to 0.

    Returns:
        Povm: Elements M_{+1} and M_{-1}.
    """
    before = np.eye(2 ** qubit, dtype=np.complex128)
    after = np.eye(2 ** (n_qubits - qubit - 1), dtype=np.complex128)
    return Povm({
        +1: kron(kron(before, P0), after),
        -1: kron(kron(before, P1), after),
    })


def z_observable(n_qubits: int, qubit: int = 0) -> np.ndarray:
    """Z on the measured qubit, identity elsewhere."""
    return z_on(qubit, n_qubits)


def expectation(rho: DensityMatrix, obs: np.ndarray) -> float:
    """
    Tr[obs rho] for a Hermitian observable.

    Args:
        rho (DensityMatrix): State.
        obs (np.ndarray): Hermitian observable.

    Raises:
        ValueError: If obs is not Hermitian or the dimensions differ.

    Returns:
        float: Real part of the trace.
    """
    obs = np.asarray(obs)
    if obs.shape != rho.matrix.shape:
        raise ValueError(f"observable of shape {obs.shape} does not match state of shape {rho.matrix.shape}")
    if not is_hermitian(obs, HERMITIAN_TOL):
        raise ValueError("observable is not Hermitian")
    value = np.trace(obs @ rho.matrix)
    if abs(value.imag) > IMAG_TOL:
        LOGGER.warning("Expectation has imaginary part %s", value.imag)
    return float(value.real)


def measure_probability(rho: DensityMatrix, povm: Povm, label) -> float:
    """
    Tr[M_label rho], clamped to [0, 1] when it lies within 1e-10 outside.

    Args:
        rho (DensityMatrix): State.
        povm (Povm): Measurement.
        label: Outcome label.

    Raises:
        ValueError: If the label is unknown or the probability is out of range.

    Returns:
        float: Outcome probability.
    """
    if label not in povm:
        raise ValueError(f"unknown outcome label {label!r}, expected one of {povm.labels}")
    probability = float(np.trace(povm[label] @ rho.matrix).real)
    if -CLAMP_TOL <= probability < 0.0 or 1.0 < probability <= 1.0 + CLAMP_TOL:
        return min(max(probability, 0.0), 1.0)
    if not 0.0 <= probability <= 1.0:
        LOGGER.error("Probability %s for outcome %r is out of range", probability, label)
        raise ValueError(f"probability {probability} is outside [0, 1]")
    return probability
