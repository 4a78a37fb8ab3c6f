import io
import json
import tempfile
import unittest
from contextlib import redirect_stdout
from os import path
from unittest import mock

import pandas as pd

from qfibound.bounds.generalization import decompose
from qfibound.run import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from qfibound.util.errors import NumericalError


def run(*argv):
    output = io.StringIO()
    with redirect_stdout(output):
        code = main(list(argv))
    return code, output.getvalue()


class TestCommands(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.directory = tempfile.TemporaryDirectory()
        cls.data_dir = path.join(cls.directory.name, "data")
        code, _ = run("prepare-data", "--out", cls.data_dir)
        assert code == EXIT_OK

    @classmethod
    def tearDownClass(cls):
        cls.directory.cleanup()

    def write_config(self, name, **settings):
        file_path = path.join(self.directory.name, name)
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(settings, file)
        return file_path

    def test_prepare_data(self):
        self.assertTrue(path.isfile(path.join(self.data_dir, "iris.csv")))
        self.assertTrue(path.isfile(path.join(self.data_dir, "digits.csv")))

    def test_bounds(self):
        code, output = run("bounds", "--d", "12", "--n", "80", "--cprime", "10", "--delta", "0.01", "--risk", "0.1")
        self.assertEqual(code, EXIT_OK)
        expected = decompose(12, 80, 10.0, 0.01, 0.1)
        self.assertIn(f"bound: {expected.bound}", output)
        self.assertIn("complexity_term", output)
        self.assertIn("confidence_term", output)

    def test_table1(self):
        code, output = run("table1", "--out", path.join(self.directory.name, "table"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("100002", output)
        table = pd.read_csv(path.join(self.directory.name, "table", "table1.csv"))
        self.assertEqual(list(table["N"]), [8, 13, 102, 1002, 10002, 50002, 100002])

    def test_surface(self):
        out_dir = path.join(self.directory.name, "surface")
        code, _ = run("surface", "--dims", "1,10", "--samples", "10,100", "--out", out_dir)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(pd.read_csv(path.join(out_dir, "surface.csv"))), 4)
        self.assertEqual(run("surface", "--dims", "a,b", "--out", out_dir)[0], EXIT_USAGE)
        self.assertEqual(run("surface", "--dims", "0", "--out", out_dir)[0], EXIT_USAGE)

    def test_qfim(self):
        config = self.write_config("qfim.json", dataset="iris", n_qubits=1, layers=[1], noise_rates=[0.1],
                                   rotation="rx", data_dir=self.data_dir)
        code, output = run("qfim", "--config", config, "--point", "0.3")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("spectrum:", output)
        self.assertIn("log_sqrt_det:", output)
        self.assertEqual(run("qfim", "--config", config, "--point", "0.3,0.4")[0], EXIT_USAGE)

    def test_run(self):
        out_dir = path.join(self.directory.name, "results")
        config = self.write_config("run.json", dataset="iris", n_qubits=1, layers=[1], noise_rates=[0.1],
                                   train_sizes=[10], epochs=1, n_runs=1, global_samples=2, boundary_samples=2,
                                   interior_samples=2, lipschitz_samples=2, data_dir=self.data_dir,
                                   out_dir=out_dir)
        code, output = run("run", "--config", config)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("results:", output)
        self.assertTrue(path.isfile(path.join(out_dir, "aggregate_iris.csv")))

    def test_exit_codes(self):
        self.assertEqual(run("frobnicate")[0], EXIT_USAGE)
        self.assertEqual(run("bounds", "--d", "12")[0], EXIT_USAGE)
        self.assertEqual(run("bounds", "--d", "0", "--n", "10", "--cprime", "1", "--delta", "0.1")[0], EXIT_USAGE)
        self.assertEqual(run("run", "--config", path.join(self.directory.name, "absent.json"))[0], EXIT_USAGE)
        missing = self.write_config("missing.json", data_dir=path.join(self.directory.name, "nowhere"))
        self.assertEqual(run("run", "--config", missing)[0], EXIT_DATA)
        with mock.patch("qfibound.run.decompose", side_effect=NumericalError("not finite")):
            code, _ = run("bounds", "--d", "1", "--n", "10", "--cprime", "1", "--delta", "0.1")
        self.assertEqual(code, EXIT_NUMERIC)


if __name__ == '__main__':
    unittest.main()
