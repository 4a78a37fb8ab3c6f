"""
Circuit description: rotation kind, noise placement and the parameter space
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

THETA_BOUND = 2.0 * np.pi


class RotationKind(Enum):
    """
    Trainable single-qubit block used in every layer.
    """
    EULER_ZYZ = "zyz"
    RX = "rx"
    RY = "ry"
    RZ = "rz"

    @property
    def params_per_rot(self) -> int:
        return 3 if self is RotationKind.EULER_ZYZ else 1


class NoiseModel(Enum):
    """
    How noise sites sharing a position are turned into channels.
    """
    GLOBAL = "global"
    LOCAL = "local"


@dataclass(frozen=True)
class NoiseSite:
    """
    A depolarizing channel on one qubit. Position 0 is right after encoding,
    position l is right after layer l.
    """
    position: int
    qubit: int


@dataclass(frozen=True)
class CircuitSpec:
    """
    Layered ansatz: angle encoding, noise, rotation and ring-CNOT layers, noise, Z measurement.
    """
    n_qubits: int = 2
    n_layers: int = 2
    noise_rate: float = 0.0
    rotation: RotationKind = RotationKind.EULER_ZYZ
    noise_model: NoiseModel = NoiseModel.GLOBAL
    per_layer_noise: bool = False
    noise_sites: Optional[Tuple[NoiseSite, ...]] = field(default=None)
    measured_qubit: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if self.n_layers < 1:
            raise ValueError(f"n_layers must be positive, got {self.n_layers}")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError(f"noise rate must be in [0, 1), got {self.noise_rate}")
        if not 0 <= self.measured_qubit < self.n_qubits:
            raise ValueError(f"measured qubit {self.measured_qubit} out of range")
        if self.noise_sites is not None:
            object.__setattr__(self, "noise_sites", tuple(self.noise_sites))
            for site in self.noise_sites:
                if not 0 <= site.position <= self.n_layers or not 0 <= site.qubit < self.n_qubits:
                    raise ValueError(f"invalid noise site {site}")

    @property
    def params_per_rot(self) -> int:
        return self.rotation.params_per_rot

    @property
    def d(self) -> int:
        """Parameter dimension n_layers * n_qubits * params_per_rot."""
        return self.n_layers * self.n_qubits * self.params_per_rot

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def sites(self) -> Tuple[NoiseSite, ...]:
        """
        Noise sites in effect. By default every qubit is hit after encoding and after
        the last layer, plus after every inner layer when per_layer_noise is set.
        """
        if self.noise_sites is not None:
            return self.noise_sites
        positions = range(self.n_layers + 1) if self.per_layer_noise else (0, self.n_layers)
        return tuple(NoiseSite(position, qubit) for position in positions for qubit in range(self.n_qubits))

    def barriers(self, position: int) -> Tuple[Tuple[int, ...], ...]:
        """
        Groups of qubits that receive one depolarizing channel at a position.

        Args:
            position (int): 0 for after encoding, l for after layer l.

        Returns:
            tuple: One tuple of qubits per channel, empty when no noise applies.
        """
        qubits = tuple(sorted({site.qubit for site in self.sites if site.position == position}))
        if not qubits or self.noise_rate == 0.0:
            return ()
        if self.noise_model is NoiseModel.GLOBAL:
            return (qubits,)
        return tuple((qubit,) for qubit in qubits)

    @property
    def k0(self) -> int:
        """Number of channels acting on the measured qubit."""
        if self.noise_model is NoiseModel.GLOBAL:
            return len({site.position for site in self.sites if site.qubit == self.measured_qubit})
        return sum(1 for site in self.sites if site.qubit == self.measured_qubit)

    def eta(self, p: float = None) -> float:
        """(1-p)**k0, the factor noise applies to the noiseless model value."""
        p = self.noise_rate if p is None else p
        return (1.0 - p) ** self.k0

    def with_noise(self, p: float) -> "CircuitSpec":
        return replace(self, noise_rate=float(p))

    def parameter_space(self) -> "ParameterSpace":
        return ParameterSpace(self.d)


@dataclass(frozen=True)
class ParameterSpace:
    """
    Hypercube [-2pi, 2pi]^d of admissible parameters.
    """
    d: int
    lower: float = -THETA_BOUND
    upper: float = THETA_BOUND

    @property
    def log_volume(self) -> float:
        return self.d * float(np.log(self.upper - self.lower))

    def contains(self, theta: np.ndarray) -> bool:
        theta = np.asarray(theta, dtype=float)
        return theta.shape == (self.d,) and bool(np.all((theta >= self.lower) & (theta <= self.upper)))

    def clip(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(theta, dtype=float), self.lower, self.upper)

    def sample(self, rng: np.random.Generator, size: int = None) -> np.ndarray:
        """Uniform draw(s) from the cube."""
        shape = (self.d,) if size is None else (size, self.d)
        return rng.uniform(self.lower, self.upper, size=shape)


def check_theta(theta, spec: CircuitSpec) -> np.ndarray:
    """
    Coerces a parameter vector (or stack) and checks its length against spec.d.

    Raises:
        ValueError: On a dimension mismatch.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0 or theta.shape[-1] != spec.d:
        raise ValueError(f"expected {spec.d} parameters, got shape {theta.shape}")
    return theta
