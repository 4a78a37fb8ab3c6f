import math
import unittest

from qfibound.bounds.dudley import dudley_closed_form, dudley_integral, dudley_numeric
from qfibound.bounds.generalization import rademacher_bound


class TestDudley(unittest.TestCase):

    def test_below_closed_bound(self):
        for d in (1, 4, 12):
            for c_prime in (0.5, 1.0, 5.0):
                bound = math.sqrt(math.pi * d) / 2 * math.exp(c_prime / d)
                self.assertLessEqual(dudley_integral(d, c_prime), bound + 1e-9)

    def test_zero_constant(self):
        self.assertAlmostEqual(dudley_integral(1, 0.0), math.sqrt(math.pi) / 2, delta=1e-6)
        self.assertAlmostEqual(dudley_integral(4, 0.0), math.sqrt(math.pi), delta=1e-6)

    def test_closed_form_agrees(self):
        for d in (1, 3, 10, 50):
            for c_prime in (0.0, 0.5, 2.0, 20.0):
                numeric = dudley_numeric(d, c_prime, 40)
                closed = dudley_closed_form(d, c_prime, 40)
                self.assertAlmostEqual(numeric, closed, delta=1e-7 * closed)
                self.assertLessEqual(numeric, rademacher_bound(d, 40, c_prime) + 1e-9)

    def test_rejects(self):
        with self.assertRaises(ValueError):
            dudley_integral(1, -0.1)
        with self.assertRaises(ValueError):
            dudley_numeric(1, 1.0, 0)
        with self.assertRaises(ValueError):
            dudley_closed_form(1, -1.0, 10)


if __name__ == '__main__':
    unittest.main()
