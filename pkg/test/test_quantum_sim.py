import unittest

import numpy as np

from qfibound.quantum.channels import KrausChannel, apply_channel, apply_unitary, depolarizing, kraus_sum
from qfibound.quantum.gates import I2, X, Y, Z, cnot, embed, pauli_string, ring_entangler, rot, rx, ry, rz
from qfibound.quantum.measurement import Povm, computational_povm, expectation, measure_probability, z_observable
from qfibound.quantum.states import DensityMatrix, PureState


def random_density(rng, n_qubits, rank=None):
    dim = 2 ** n_qubits
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ np.conj(a.T)
    return DensityMatrix(rho / np.trace(rho).real)


class TestGates(unittest.TestCase):

    def test_rotations_are_unitary(self):
        angles = np.linspace(-7.0, 7.0, 11)
        for gate in (rx(angles), ry(angles), rz(angles), rot(angles, angles / 2, -angles)):
            products = np.conj(np.swapaxes(gate, -1, -2)) @ gate
            np.testing.assert_allclose(products, np.broadcast_to(I2, products.shape), atol=1e-12)

    def test_rotation_closed_forms(self):
        np.testing.assert_allclose(rx(np.pi), -1j * X, atol=1e-12)
        np.testing.assert_allclose(ry(np.pi), -1j * Y, atol=1e-12)
        np.testing.assert_allclose(rz(np.pi), -1j * Z, atol=1e-12)
        np.testing.assert_allclose(rot(0.3, 0.0, 0.4), rz(0.7), atol=1e-12)

    def test_cnot_and_ring(self):
        # |10> -> |11> under CNOT(0 -> 1)
        self.assertEqual(cnot(0, 1, 2)[3, 2], 1.0)
        np.testing.assert_allclose(ring_entangler(2), cnot(1, 0, 2) @ cnot(0, 1, 2))
        np.testing.assert_allclose(ring_entangler(1), np.eye(2))
        with self.assertRaises(ValueError):
            cnot(1, 1, 2)

    def test_embed(self):
        np.testing.assert_allclose(embed(Z, 0, 2), pauli_string("ZI"))
        np.testing.assert_allclose(embed(X, 1, 2), pauli_string("IX"))
        with self.assertRaises(ValueError):
            embed(X, 2, 2)


class TestStates(unittest.TestCase):

    def test_zero_state(self):
        rho = PureState.zero(2).density_matrix()
        self.assertAlmostEqual(rho.trace(), 1.0)
        np.testing.assert_allclose(rho.eigenvalues(), [0.0, 0.0, 0.0, 1.0], atol=1e-12)

    def test_invalid_states(self):
        with self.assertRaises(ValueError):
            PureState(np.array([1.0, 1.0]))
        with self.assertRaises(ValueError):
            PureState(np.ones(3) / np.sqrt(3))
        with self.assertRaises(ValueError):
            DensityMatrix(np.diag([0.5, 0.6]))
        with self.assertRaises(ValueError):
            DensityMatrix(np.diag([1.5, -0.5]))
        with self.assertRaises(ValueError):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))


class TestChannels(unittest.TestCase):

    def test_single_qubit_kraus_set(self):
        p = 0.2
        channel = depolarizing(p, 0, 1)
        self.assertEqual(len(channel), 4)
        np.testing.assert_allclose(channel.operators[0], np.sqrt(1 - 3 * p / 4) * I2)
        completeness = sum(np.conj(k.T) @ k for k in channel.operators)
        np.testing.assert_allclose(completeness, np.eye(2), atol=1e-12)

    def test_depolarizing_action(self):
        rng = np.random.default_rng(7)
        for p in (0.0, 0.05, 0.5, 0.9):
            rho = random_density(rng, 1)
            out = apply_channel(rho, depolarizing(p, 0, 1))
            np.testing.assert_allclose(out.matrix, (1 - p) * rho.matrix + p * np.eye(2) / 2, atol=1e-12)

    def test_global_barrier(self):
        rng = np.random.default_rng(8)
        rho = random_density(rng, 2)
        p = 0.3
        out = kraus_sum(rho.matrix, depolarizing(p, (0, 1), 2).operators)
        np.testing.assert_allclose(out, (1 - p) * rho.matrix + p * np.eye(4) / 4, atol=1e-12)

    def test_local_channel_on_one_qubit(self):
        rng = np.random.default_rng(9)
        rho = random_density(rng, 2)
        out = apply_channel(rho, depolarizing(0.4, 1, 2))
        self.assertAlmostEqual(out.trace(), 1.0, places=12)
        out.validate()
        # Z on the untouched qubit keeps its expectation
        self.assertAlmostEqual(expectation(out, z_observable(2, 0)), expectation(rho, z_observable(2, 0)), places=12)

    def test_near_full_depolarization(self):
        rho = PureState.zero(1).density_matrix()
        out = apply_channel(rho, depolarizing(1.0 - 1e-12, 0, 1))
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-11)

    def test_depolarized_zero_state(self):
        rho = PureState.zero(1).density_matrix()
        out = apply_channel(rho, depolarizing(0.3, 0, 1))
        np.testing.assert_allclose(out.matrix, np.diag([0.85, 0.15]), atol=1e-12)

    def test_composition_scales_z(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            p1, p2 = rng.uniform(0, 0.99, size=2)
            for n_qubits in (1, 2):
                rho = random_density(rng, n_qubits)
                z = z_observable(n_qubits, 0)
                out = apply_channel(apply_channel(rho, depolarizing(p1, 0, n_qubits)), depolarizing(p2, 0, n_qubits))
                self.assertAlmostEqual(expectation(out, z), (1 - p1) * (1 - p2) * expectation(rho, z), places=12)

    def test_trace_and_positivity_preserved(self):
        rng = np.random.default_rng(10)
        targets = (0, 1, (0, 1))
        for i in range(1000):
            rho = random_density(rng, 2, rank=1 + i % 4)
            out = apply_channel(rho, depolarizing(rng.uniform(0, 0.999), targets[i % 3], 2))
            self.assertLess(abs(out.trace() - 1.0), 1e-10)
            self.assertGreaterEqual(out.eigenvalues()[0], -1e-9)

    def test_rejects(self):
        with self.assertRaises(ValueError):
            depolarizing(1.0, 0, 1)
        with self.assertRaises(ValueError):
            depolarizing(-0.1, 0, 1)
        with self.assertRaises(ValueError):
            depolarizing(0.1, 2, 2)
        with self.assertRaises(ValueError):
            depolarizing(0.1, (0, 0), 2)
        with self.assertRaises(ValueError):
            KrausChannel([2.0 * I2])
        with self.assertRaises(ValueError):
            apply_channel(PureState.zero(2).density_matrix(), depolarizing(0.1, 0, 1))

    def test_apply_unitary(self):
        rho = PureState.zero(1).density_matrix()
        flipped = apply_unitary(rho, X)
        np.testing.assert_allclose(flipped.matrix, np.diag([0.0, 1.0]))
        with self.assertRaises(ValueError):
            apply_unitary(rho, 2.0 * I2)
        with self.assertRaises(ValueError):
            apply_unitary(rho, np.eye(4))


class TestMeasurement(unittest.TestCase):

    def test_probabilities(self):
        rng = np.random.default_rng(11)
        povm = computational_povm(2)
        for _ in range(10):
            rho = random_density(rng, 2)
            plus = measure_probability(rho, povm, +1)
            minus = measure_probability(rho, povm, -1)
            self.assertAlmostEqual(plus + minus, 1.0, places=12)
            self.assertAlmostEqual(plus - minus, expectation(rho, z_observable(2)), places=12)

    def test_rx_quarter_turn(self):
        rho = apply_unitary(PureState.zero(1).density_matrix(), rx(np.pi / 2))
        self.assertAlmostEqual(expectation(rho, z_observable(1)), 0.0, places=12)
        self.assertAlmostEqual(measure_probability(rho, computational_povm(1), +1), 0.5, places=12)

    def test_maximally_mixed(self):
        rho = DensityMatrix.maximally_mixed(2)
        self.assertAlmostEqual(measure_probability(rho, computational_povm(2), +1), 0.5)
        self.assertAlmostEqual(expectation(rho, z_observable(2)), 0.0)

    def test_rejects(self):
        rho = PureState.zero(1).density_matrix()
        with self.assertRaises(ValueError):
            measure_probability(rho, computational_povm(1), 0)
        with self.assertRaises(ValueError):
            expectation(rho, np.array([[0.0, 1.0], [0.0, 0.0]]))
        with self.assertRaises(ValueError):
            Povm({0: np.diag([1.0, 0.0])})
        with self.assertRaises(ValueError):
            Povm({0: np.diag([1.5, 1.0]), 1: np.diag([-0.5, 0.0])})


if __name__ == '__main__':
    unittest.main()
