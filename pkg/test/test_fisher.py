import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from qfibound.circuit.spec import CircuitSpec, NoiseSite, RotationKind
from qfibound.fisher.classical import cfim, depolarizing_eta, noisy_cfim_scaled
from qfibound.fisher.effective_dimension import (
    effective_dim_ipr, effective_dim_rank, effective_dim_threshold, summarize_spectra,
)
from qfibound.fisher.matrix import FisherKind, FisherMatrix
from qfibound.fisher.quantum import (
    QfimLandscape, batch_qfim, local_geometry, qfim_mixed, qfim_pure, symmetric_log_derivative,
)
from qfibound.gradients.param_shift import density_derivatives
from qfibound.util.errors import NumericalError

ONE_SITE = (NoiseSite(1, 0),)


def toy(p=0.0, sites=None):
    return CircuitSpec(n_qubits=1, n_layers=1, noise_rate=p, rotation=RotationKind.RX, noise_sites=sites)


class TestQuantumFisher(unittest.TestCase):

    def test_rx_on_zero(self):
        for theta in (0.0, 0.4, 2.5):
            self.assertAlmostEqual(qfim_pure([0.0], [theta], toy()).matrix[0, 0], 1.0, places=9)
            self.assertAlmostEqual(qfim_mixed([0.0], [theta], toy()).matrix[0, 0], 1.0, places=9)

    def test_mixed_toy(self):
        for p in (0.05, 0.1, 0.5):
            spec = toy(p, ONE_SITE)
            self.assertEqual(spec.k0, 1)
            for theta in (0.3, 1.1, -2.0):
                self.assertAlmostEqual(qfim_mixed([0.0], [theta], spec).matrix[0, 0], (1 - p) ** 2, places=9)

    def test_mixed_matches_pure_without_noise(self):
        rng = np.random.default_rng(30)
        for _ in range(50):
            spec = CircuitSpec(int(rng.integers(1, 3)), int(rng.integers(1, 3)),
                               rotation=list(RotationKind)[rng.integers(len(RotationKind))])
            x = rng.uniform(0, np.pi, 4)
            theta = spec.parameter_space().sample(rng)
            difference = qfim_mixed(x, theta, spec).matrix - qfim_pure(x, theta, spec).matrix
            self.assertLess(np.linalg.norm(difference), 1e-6)

    def test_pure_rejects_noise(self):
        with self.assertRaises(ValueError):
            qfim_pure([0.0], [0.1], toy(0.1))

    def test_symmetric_and_psd(self):
        rng = np.random.default_rng(31)
        spec = CircuitSpec(noise_rate=0.1)
        fisher = qfim_mixed(rng.uniform(0, np.pi, 4), spec.parameter_space().sample(rng), spec)
        self.assertEqual(fisher.kind, FisherKind.QUANTUM)
        np.testing.assert_allclose(fisher.matrix, fisher.matrix.T)
        self.assertGreaterEqual(fisher.eigenvalues[0], -1e-8)

    def test_sld(self):
        rng = np.random.default_rng(32)
        spec = CircuitSpec(noise_rate=0.2)
        x = rng.uniform(0, np.pi, 4)
        theta = spec.parameter_space().sample(rng)
        rho, drho = density_derivatives(x[None], theta, spec)
        fisher = qfim_mixed(x, theta, spec)
        for j in (0, 3):
            sld = symmetric_log_derivative(rho[0], drho[j, 0])
            np.testing.assert_allclose((sld @ rho[0] + rho[0] @ sld) / 2, drho[j, 0], atol=1e-9)
            self.assertAlmostEqual(np.trace(rho[0] @ sld @ sld).real, fisher.matrix[j, j], places=8)

    def test_batch_average(self):
        rng = np.random.default_rng(33)
        spec = CircuitSpec(noise_rate=0.05)
        features = rng.uniform(0, np.pi, (4, 4))
        theta = spec.parameter_space().sample(rng)
        expected = np.mean([qfim_mixed(x, theta, spec).matrix for x in features], axis=0)
        averaged = batch_qfim(features, theta, spec)
        np.testing.assert_allclose(averaged.matrix, expected, atol=1e-12)
        self.assertEqual(averaged.n_samples, 4)

    def test_geometry_gradients(self):
        spec = toy(0.1)
        geometry = local_geometry(np.zeros((1, 1)), np.array([0.7]), spec)
        self.assertAlmostEqual(geometry.values[0], 0.81 * np.cos(0.7), places=12)
        self.assertAlmostEqual(geometry.gradients[0, 0], -0.81 * np.sin(0.7), places=12)
        self.assertAlmostEqual(geometry.max_gradient_norm(), 0.81 * np.sin(0.7), places=12)

    def test_landscape_cache(self):
        spec = CircuitSpec(noise_rate=0.1)
        landscape = QfimLandscape(spec, np.full((2, 4), 0.5))
        theta = np.linspace(-1, 1, 12)
        self.assertIs(landscape.geometry(theta), landscape.geometry(theta.copy()))
        self.assertLessEqual(landscape.log_min_eigenvalue(theta), landscape.log_sqrt_det(theta) / 6 + 1e-12)


class TestClassicalFisher(unittest.TestCase):

    def test_toy(self):
        for p in (0.0, 0.1, 0.5):
            s = 1 - p
            for theta in (0.4, 1.3, -2.2):
                expected = s ** 2 * np.sin(theta) ** 2 / (1 - s ** 2 * np.cos(theta) ** 2)
                fisher = cfim([0.0], [theta], toy(p, ONE_SITE))
                self.assertEqual(fisher.kind, FisherKind.CLASSICAL)
                self.assertAlmostEqual(fisher.matrix[0, 0], expected, places=9)

    def test_scaled_form_matches_noisy_model(self):
        rng = np.random.default_rng(34)
        for p in (0.05, 0.5):
            spec = CircuitSpec(noise_rate=p)
            eta, eta_prime = depolarizing_eta(p, spec.k0)
            for _ in range(5):
                x = rng.uniform(0, np.pi, 4)
                theta = spec.parameter_space().sample(rng)
                np.testing.assert_allclose(noisy_cfim_scaled(x, theta, spec, eta, eta_prime).matrix,
                                           cfim(x, theta, spec).matrix, atol=1e-9)

    def test_scaled_rejects_nonpositive_eta(self):
        with self.assertRaises(ValueError):
            noisy_cfim_scaled([0.3], [0.2], toy(), lambda u: u - 2.0, lambda u: 1.0)

    def test_information_inequality(self):
        rng = np.random.default_rng(35)
        for _ in range(100):
            spec = CircuitSpec(noise_rate=float(rng.uniform(0.0, 0.9)))
            x = rng.uniform(0, np.pi, 4)
            theta = spec.parameter_space().sample(rng)
            gap = qfim_mixed(x, theta, spec).matrix - cfim(x, theta, spec).matrix
            self.assertGreaterEqual(np.linalg.eigvalsh(gap)[0], -1e-8)


class TestFisherMatrix(unittest.TestCase):

    def test_rejects(self):
        with self.assertRaises(NumericalError):
            FisherMatrix(FisherKind.QUANTUM, np.array([[1.0, 0.5], [0.0, 1.0]]))
        with self.assertRaises(NumericalError):
            FisherMatrix(FisherKind.QUANTUM, np.array([[np.nan]]))
        with self.assertRaises(ValueError):
            FisherMatrix(FisherKind.QUANTUM, np.ones((2, 3)))
        with self.assertRaises(NumericalError):
            _ = FisherMatrix(FisherKind.QUANTUM, np.diag([1.0, -1.0])).eigenvalues

    def test_spectrum_order(self):
        fisher = FisherMatrix(FisherKind.CLASSICAL, np.diag([1.0, 3.0, 2.0]))
        np.testing.assert_allclose(fisher.eigenvalues, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(fisher.descending(), [3.0, 2.0, 1.0])
        self.assertFalse(fisher.matrix.flags.writeable)


class TestEffectiveDimension(unittest.TestCase):

    def test_ipr(self):
        self.assertAlmostEqual(effective_dim_ipr([2.0, 1.0]), 1.8, places=12)
        self.assertAlmostEqual(effective_dim_ipr(np.ones(5)), 5.0)
        self.assertAlmostEqual(effective_dim_ipr([0.0, 0.0, 4.0]), 1.0)
        with self.assertRaises(ValueError):
            effective_dim_ipr([0.0, 0.0])
        with self.assertRaises(ValueError):
            effective_dim_ipr([1.0, -0.1])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=12))
    def test_ipr_bounded_by_rank(self, values):
        values = np.array(values)
        if not np.any(values > 1e-10):
            return
        fisher = FisherMatrix(FisherKind.QUANTUM, np.diag(values))
        ipr = effective_dim_ipr(fisher.eigenvalues, tol=1e-10)
        self.assertGreaterEqual(ipr, 1.0 - 1e-9)
        self.assertLessEqual(ipr, effective_dim_rank(fisher) + 1e-9)

    def test_rank_and_threshold(self):
        first = FisherMatrix(FisherKind.QUANTUM, np.diag([1.0, 0.5, 0.0]))
        second = FisherMatrix(FisherKind.QUANTUM, np.diag([1.0, 0.2, 0.1]))
        self.assertEqual(effective_dim_rank(first), 2)
        self.assertEqual(effective_dim_rank([first, second]), 3)
        self.assertEqual(effective_dim_threshold([first.descending(), second.descending()], 0.3), 1)
        self.assertEqual(effective_dim_threshold([[0.1, 0.0]], 0.5), 0)
        with self.assertRaises(ValueError):
            effective_dim_threshold([[0.1, 0.5]], 0.05)
        with self.assertRaises(ValueError):
            effective_dim_threshold([], 0.5)

    def test_summary(self):
        first = FisherMatrix(FisherKind.QUANTUM, np.diag([2.0, 1.0, 0.0]))
        second = FisherMatrix(FisherKind.QUANTUM, np.diag([1.0, 1.0, 1.0]))
        summary = summarize_spectra([first, second], alpha=0.5)
        self.assertEqual(summary.rank_based, 3)
        self.assertAlmostEqual(summary.ipr_based, 3.0)
        self.assertEqual(summary.threshold_based, 2)
        self.assertEqual(summary.d, 3)


if __name__ == '__main__':
    unittest.main()
