"""
Command line entry point: experiment grid, closed-form bounds, scaling table, QFIM probe and data export
"""

import argparse
import sys
from typing import List, Sequence

import numpy as np

from qfibound import DET_FLOOR, LOGGER, SLD_FLOOR, set_verbose
from qfibound.bounds.generalization import TABLE1_DELTA, decompose
from qfibound.experiments.config import DATA_DIR, OUT_DIR, load_config
from qfibound.experiments.datasets import DatasetCache, export_bundled_datasets, pca_reduce, scale_features
from qfibound.experiments.results import emit_results, table1_frame, write_surface, write_table1
from qfibound.experiments.runner import run_experiment
from qfibound.fisher.effective_dimension import effective_dim_ipr, effective_dim_rank
from qfibound.fisher.quantum import batch_qfim
from qfibound.linalg.tensor import log_sqrt_det_from_spectrum
from qfibound.threading.worker_manager import WorkerManager
from qfibound.util.errors import DataError, NumericalError, UsageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

SURFACE_DIMENSIONS = (1, 2, 5, 10, 20, 50, 100)
SURFACE_SAMPLES = (10, 100, 1000, 10000, 100000)


class ArgumentParser(argparse.ArgumentParser):
    """
    Parser whose usage errors raise UsageError instead of exiting with status 2.
    """

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _csv_ints(text: str) -> List[int]:
    try:
        return [int(value) for value in text.split(",") if value.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from error


def _csv_floats(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(",") if value.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from error


PARSER = ArgumentParser(
    prog="qfibound",
    description="Generalization bounds of noisy parameterized quantum circuits from the quantum Fisher information",
    epilog="Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure",
)
PARSER.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
SUBPARSERS = PARSER.add_subparsers(dest="command", required=True)

RUN_PARSER = SUBPARSERS.add_parser("run", help="Train the configured grid and write result tables")
RUN_PARSER.add_argument("--config", required=True, help="Experiment config (JSON)")

BOUNDS_PARSER = SUBPARSERS.add_parser("bounds", help="Print the three-term bound for a complexity constant")
BOUNDS_PARSER.add_argument("--d", type=int, required=True, help="Parameter dimension")
BOUNDS_PARSER.add_argument("--n", type=int, required=True, help="Training samples")
BOUNDS_PARSER.add_argument("--cprime", type=float, required=True, help="Complexity constant C'")
BOUNDS_PARSER.add_argument("--delta", type=float, required=True, help="Confidence level")
BOUNDS_PARSER.add_argument("--risk", type=float, default=0.0, help="Empirical risk (default 0)")

TABLE1_PARSER = SUBPARSERS.add_parser("table1", help="Print the k(d) and required-sample table")
TABLE1_PARSER.add_argument("--cprime", type=float, default=1.0, help="Complexity constant C' (default 1)")
TABLE1_PARSER.add_argument("--delta", type=float, default=TABLE1_DELTA, help="Confidence level (default 0.005)")
TABLE1_PARSER.add_argument("--out", help="Also write table1.csv into this directory")

SURFACE_PARSER = SUBPARSERS.add_parser("surface", help="Write the complexity term over a (d, N) grid")
SURFACE_PARSER.add_argument("--cprime", type=float, default=1.0, help="Complexity constant C' (default 1)")
SURFACE_PARSER.add_argument("--dims", type=_csv_ints, default=list(SURFACE_DIMENSIONS), help="Dimensions")
SURFACE_PARSER.add_argument("--samples", type=_csv_ints, default=list(SURFACE_SAMPLES), help="Sample counts")
SURFACE_PARSER.add_argument("--out", default=OUT_DIR, help="Output directory")

QFIM_PARSER = SUBPARSERS.add_parser("qfim", help="Print the batch-averaged QFIM at a parameter point")
QFIM_PARSER.add_argument("--config", required=True, help="Experiment config (JSON)")
QFIM_PARSER.add_argument("--point", type=_csv_floats, required=True, help="Comma-separated angles")

PREPARE_PARSER = SUBPARSERS.add_parser("prepare-data", help="Write iris.csv and digits.csv")
PREPARE_PARSER.add_argument("--out", default=DATA_DIR, help="Output directory")


def command_run(args) -> int:
    config = load_config(args.config)
    rows = run_experiment(config)
    for kind, file_path in emit_results(rows, config.out_dir).items():
        print(f"{kind}: {file_path}")
    return EXIT_OK


def command_bounds(args) -> int:
    report = decompose(args.d, args.n, args.cprime, args.delta, args.risk)
    for name, value in report.as_dict().items():
        print(f"{name}: {value}")
    return EXIT_OK


def command_table1(args) -> int:
    print(table1_frame(args.cprime, args.delta).to_string(index=False))
    if args.out:
        print(f"table1: {write_table1(args.out, args.cprime, args.delta)}")
    return EXIT_OK


def command_surface(args) -> int:
    if not args.dims or not args.samples or min(args.dims) < 1 or min(args.samples) < 1:
        raise UsageError("dimensions and sample counts must be positive")
    print(f"surface: {write_surface(args.out, args.dims, args.samples, args.cprime)}")
    return EXIT_OK


def command_qfim(args) -> int:
    config = load_config(args.config)
    spec = config.circuit(config.layers[0], config.noise_rates[0])
    theta = np.asarray(args.point, dtype=float)
    if theta.shape != (spec.d,):
        raise UsageError(f"--point needs {spec.d} angles for {config.layers[0]} layers, got {theta.size}")
    dataset = DatasetCache().get(config.dataset, config.data_dir)
    features = dataset.features
    if config.pca_components < features.shape[1]:
        features = pca_reduce(features, config.pca_components)[0]
    fisher = batch_qfim(scale_features(features), theta, spec)
    spectrum = fisher.eigenvalues
    np.set_printoptions(precision=6, suppress=True, linewidth=160)
    print(f"QFIM ({spec.d} x {spec.d}) over {len(dataset)} samples at p = {spec.noise_rate}:")
    print(fisher.matrix)
    print(f"spectrum: {spectrum}")
    print(f"rank: {effective_dim_rank(fisher)}")
    print(f"ipr: {effective_dim_ipr(spectrum, tol=SLD_FLOOR) if spectrum[-1] > SLD_FLOOR else 0.0}")
    print(f"log_sqrt_det: {log_sqrt_det_from_spectrum(spectrum, DET_FLOOR)}")
    return EXIT_OK


def command_prepare_data(args) -> int:
    for name, file_path in export_bundled_datasets(args.out).items():
        print(f"{name}: {file_path}")
    return EXIT_OK


COMMANDS = {
    "run": command_run,
    "bounds": command_bounds,
    "table1": command_table1,
    "surface": command_surface,
    "qfim": command_qfim,
    "prepare-data": command_prepare_data,
}


def main(argv: Sequence[str] = None) -> int:
    """
    Parses arguments, runs a subcommand and maps failures to exit codes.

    Returns:
        int: 0 on success, 1 usage error, 2 data error, 3 numerical failure.
    """
    try:
        args = PARSER.parse_args(argv)
        set_verbose(args.verbose)
        WorkerManager().debug = args.verbose
        return COMMANDS[args.command](args)
    except UsageError as error:
        LOGGER.error("%s", error)
        return EXIT_USAGE
    except DataError as error:
        LOGGER.error("%s", error)
        return EXIT_DATA
    except NumericalError as error:
        LOGGER.error("%s", error)
        return EXIT_NUMERIC
    except ValueError as error:
        LOGGER.error("%s", error)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
