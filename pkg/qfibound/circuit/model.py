"""
Forward evaluation of the layered ansatz, noiseless and noisy
"""

from functools import lru_cache

import numpy as np

from qfibound.circuit import LOGGER
from qfibound.circuit.spec import CircuitSpec, NoiseModel, RotationKind, check_theta
from qfibound.quantum.channels import conjugate, depolarizing, kraus_sum
from qfibound.quantum.gates import kron_all, ring_entangler, rot, rx, ry, rz, z_on
from qfibound.quantum.states import DensityMatrix, PureState

ROTATIONS = {
    RotationKind.RX: rx,
    RotationKind.RY: ry,
    RotationKind.RZ: rz,
}


def as_features(x) -> np.ndarray:
    """
    Coerces one feature vector or a batch into a (B, m) float array.

    Raises:
        ValueError: If there are no features.
    """
    features = np.atleast_2d(np.asarray(x, dtype=float))
    if features.ndim != 2 or features.shape[1] == 0 or features.shape[0] == 0:
        raise ValueError("feature sequence must not be empty")
    return features


def _encoding_gates(features: np.ndarray, n_qubits: int) -> list:
    """Per-qubit products of encoding gates, each of shape (B, 2, 2)."""
    batch = features.shape[0]
    gates = [np.broadcast_to(np.eye(2, dtype=np.complex128), (batch, 2, 2)) for _ in range(n_qubits)]
    for k in range(features.shape[1]):
        gate = rx(features[:, k]) if k % 2 == 0 else ry(features[:, k])
        qubit = k % n_qubits
        gates[qubit] = gate @ gates[qubit]
    return gates


def encoded_states(features, spec: CircuitSpec) -> np.ndarray:
    """
    Encoded state vectors, feature k on qubit k mod n via RX (k even) or RY (k odd).

    Args:
        features: One feature vector or a (B, m) batch.
        spec (CircuitSpec): Circuit.

    Returns:
        np.ndarray: Amplitudes of shape (B, 2**n).
    """
    features = as_features(features)
    columns = [gate[:, :, :1] for gate in _encoding_gates(features, spec.n_qubits)]
    return kron_all(columns)[:, :, 0]


def encode(x, spec: CircuitSpec) -> PureState:
    """
    Encodes one scaled feature vector starting from |0...0>.

    Args:
        x: Feature sequence, expected in [0, pi].
        spec (CircuitSpec): Circuit.

    Returns:
        PureState: The encoded state.
    """
    return PureState(encoded_states(np.asarray(x, dtype=float).reshape(1, -1), spec)[0])


def _apply_barriers(matrices: np.ndarray, spec: CircuitSpec, position: int) -> np.ndarray:
    for qubits in spec.barriers(position):
        matrices = kraus_sum(matrices, depolarizing(spec.noise_rate, qubits, spec.n_qubits).operators)
    return matrices


@lru_cache(maxsize=64)
def _encoded_density(key: bytes, shape: tuple, spec: CircuitSpec) -> np.ndarray:
    features = np.frombuffer(key, dtype=float).reshape(shape)
    states = encoded_states(features, spec)
    matrices = np.einsum("bi,bj->bij", states, np.conj(states))
    matrices = _apply_barriers(matrices, spec, 0)
    matrices.flags.writeable = False
    return matrices


def encoded_density(features, spec: CircuitSpec) -> np.ndarray:
    """
    Encoded density matrices after the noise applied right after encoding.

    Args:
        features: One feature vector or a (B, m) batch.
        spec (CircuitSpec): Circuit.

    Returns:
        np.ndarray: Read-only array of shape (B, 2**n, 2**n).
    """
    features = np.ascontiguousarray(as_features(features))
    return _encoded_density(features.tobytes(), features.shape, spec)


def layer_unitaries(thetas, spec: CircuitSpec) -> list:
    """
    Unitaries of every layer for one or many parameter vectors.

    Parameters are consumed layer-major, qubit-major, angle-minor. Each layer applies
    one rotation per qubit followed by the ring of CNOTs.

    Args:
        thetas: Array of shape (..., d).
        spec (CircuitSpec): Circuit.

    Returns:
        list: n_layers arrays of shape (..., 2**n, 2**n).
    """
    thetas = check_theta(thetas, spec)
    angles = thetas.reshape(thetas.shape[:-1] + (spec.n_layers, spec.n_qubits, spec.params_per_rot))
    entangler = ring_entangler(spec.n_qubits)
    unitaries = []
    for layer in range(spec.n_layers):
        gates = []
        for qubit in range(spec.n_qubits):
            block = angles[..., layer, qubit, :]
            if spec.rotation is RotationKind.EULER_ZYZ:
                gates.append(rot(block[..., 0], block[..., 1], block[..., 2]))
            else:
                gates.append(ROTATIONS[spec.rotation](block[..., 0]))
        unitaries.append(entangler @ kron_all(gates))
    return unitaries


def evolve(features, thetas, spec: CircuitSpec) -> np.ndarray:
    """
    Noisy output states for every (theta, x) pair.

    Args:
        features: (B, m) batch of scaled features.
        thetas: (T, d) stack of parameter vectors.
        spec (CircuitSpec): Circuit, including its noise rate.

    Returns:
        np.ndarray: Density matrices of shape (T, B, 2**n, 2**n).
    """
    thetas = np.atleast_2d(check_theta(thetas, spec))
    encoded = encoded_density(features, spec)
    matrices = np.broadcast_to(encoded[None], (thetas.shape[0],) + encoded.shape)
    pending = None
    for layer, unitary in enumerate(layer_unitaries(thetas, spec), start=1):
        pending = unitary if pending is None else unitary @ pending
        if spec.barriers(layer) or layer == spec.n_layers:
            matrices = conjugate(matrices, pending[:, None])
            matrices = _apply_barriers(matrices, spec, layer)
            pending = None
    return matrices


def evolve_pure(features, thetas, spec: CircuitSpec) -> np.ndarray:
    """
    Noiseless output state vectors for every (theta, x) pair.

    Args:
        features: (B, m) batch of scaled features.
        thetas: (T, d) stack of parameter vectors.
        spec (CircuitSpec): Circuit. Its noise rate is ignored.

    Returns:
        np.ndarray: Amplitudes of shape (T, B, 2**n).
    """
    thetas = np.atleast_2d(check_theta(thetas, spec))
    total = None
    for unitary in layer_unitaries(thetas, spec):
        total = unitary if total is None else unitary @ total
    states = encoded_states(features, spec)
    return np.einsum("tij,bj->tbi", total, states)


def z_expectations(matrices: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Tr[Z_measured rho] over a stack of density matrices (or their derivatives)."""
    z_diagonal = np.diagonal(z_on(spec.measured_qubit, spec.n_qubits)).real
    return np.einsum("...ii,i->...", matrices, z_diagonal).real


def model_values(features, thetas, spec: CircuitSpec) -> np.ndarray:
    """
    Noisy model values f_{theta,p}(x) for every (theta, x) pair.

    Returns:
        np.ndarray: Array of shape (T, B) in [-1, 1].
    """
    return z_expectations(evolve(features, thetas, spec), spec)


def forward_pure(x, theta, spec: CircuitSpec) -> PureState:
    """Noiseless output state for one input."""
    return PureState(evolve_pure(as_features(x)[:1], theta, spec)[0, 0])


def forward_noisy(x, theta, spec: CircuitSpec) -> DensityMatrix:
    """
    Noisy output state for one input.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector of length d.
        spec (CircuitSpec): Circuit.

    Raises:
        ValueError: If theta has the wrong length or x is empty.

    Returns:
        DensityMatrix: The state reaching the measurement.
    """
    theta = check_theta(theta, spec)
    if theta.ndim != 1:
        raise ValueError("forward_noisy takes a single parameter vector")
    return DensityMatrix(evolve(as_features(x)[:1], theta, spec)[0, 0], check=False)


def model_value(x, theta, spec: CircuitSpec) -> float:
    """
    f_{theta,p}(x) = Tr[(Z x I...) rho~], equal to eta(p) times the noiseless value.

    Args:
        x: Scaled feature sequence.
        theta: Parameter vector of length d.
        spec (CircuitSpec): Circuit.

    Returns:
        float: Model value in [-1, 1].
    """
    return float(z_expectations(forward_noisy(x, theta, spec).matrix, spec))


def predict_probability(x, theta, spec: CircuitSpec) -> float:
    """Probability of label +1, (1 + f) / 2."""
    return (1.0 + model_value(x, theta, spec)) / 2.0


def predict_label(p_hat: float) -> int:
    """+1 if p_hat >= 0.5 else -1."""
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p_hat}")
    return 1 if p_hat >= 0.5 else -1


def eta(spec: CircuitSpec) -> float:
    """Noise factor (1-p)**k0 of the circuit."""
    if spec.noise_model is not NoiseModel.GLOBAL:
        LOGGER.debug("eta of a locally depolarized circuit is only approximate")
    return spec.eta()
