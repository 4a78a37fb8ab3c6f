"""
CSV output of experiment rows, their per-cell aggregates and the sample-scaling table
"""

from dataclasses import asdict
from os import makedirs, path
from typing import Dict, Sequence

import numpy as np
import pandas as pd

from qfibound.bounds.generalization import TABLE1_DELTA, complexity_surface, table1
from qfibound.experiments import LOGGER
from qfibound.experiments.runner import ResultRow
from qfibound.util.errors import DataError

FLOAT_FORMAT = "%.9g"
GROUP_COLUMNS = ["n_layers", "p", "N_train"]
AGGREGATED_COLUMNS = ["gap", "global_bound", "local_bound", "effdim_bound"]


def _write(frame: pd.DataFrame, file_path: str):
    frame.to_csv(file_path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8")
    LOGGER.info("Wrote %s (%s rows)", file_path, len(frame))


def _ensure_dir(out_dir: str):
    try:
        makedirs(out_dir, exist_ok=True)
    except OSError as error:
        LOGGER.error("Cannot create %s: %s", out_dir, error)
        raise DataError(f"cannot write results to {out_dir}: {error}") from error


def results_frame(rows: Sequence[ResultRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows], columns=ResultRow.columns())


def aggregate(rows: Sequence[ResultRow]) -> pd.DataFrame:
    """
    Mean and population standard deviation over runs per (n_layers, p, N_train).
    Error rows are left out.

    Returns:
        pd.DataFrame: One row per cell with <field>_mean and <field>_std columns.
    """
    frame = results_frame([row for row in rows if row.ok])
    if frame.empty:
        return pd.DataFrame(columns=GROUP_COLUMNS + ["runs"] + [
            f"{name}_{stat}" for name in AGGREGATED_COLUMNS for stat in ("mean", "std")])
    grouped = frame.groupby(GROUP_COLUMNS, sort=True)
    table = grouped.size().rename("runs").to_frame()
    for name in AGGREGATED_COLUMNS:
        table[f"{name}_mean"] = grouped[name].mean()
        table[f"{name}_std"] = grouped[name].std(ddof=0)
    return table.reset_index()


def table1_frame(c_prime: float = 1.0, conf_delta: float = TABLE1_DELTA) -> pd.DataFrame:
    return pd.DataFrame(
        [(row.d, row.k, row.N, row.third_term) for row in table1(c_prime, conf_delta)],
        columns=["d", "k", "N", "third_term"],
    )


def surface_frame(dimensions: Sequence[int], sample_counts: Sequence[int], c_prime: float) -> pd.DataFrame:
    """Complexity term over a grid, in long format with columns d, N and complexity."""
    values = complexity_surface(dimensions, sample_counts, c_prime)
    d_grid, n_grid = np.meshgrid(np.asarray(dimensions), np.asarray(sample_counts), indexing="ij")
    return pd.DataFrame({"d": d_grid.ravel(), "N": n_grid.ravel(), "complexity": values.ravel()})


def write_table1(out_dir: str, c_prime: float = 1.0, conf_delta: float = TABLE1_DELTA) -> str:
    _ensure_dir(out_dir)
    file_path = path.join(out_dir, "table1.csv")
    _write(table1_frame(c_prime, conf_delta), file_path)
    return file_path


def write_surface(out_dir: str, dimensions: Sequence[int], sample_counts: Sequence[int], c_prime: float) -> str:
    _ensure_dir(out_dir)
    file_path = path.join(out_dir, "surface.csv")
    _write(surface_frame(dimensions, sample_counts, c_prime), file_path)
    return file_path


def emit_results(rows: Sequence[ResultRow], out_dir: str) -> Dict[str, str]:
    """
    Writes results.csv, aggregate_<dataset>.csv and table1.csv.

    Args:
        rows (Sequence[ResultRow]): Experiment rows.
        out_dir (str): Output directory, created if missing.

    Raises:
        ValueError: If rows is empty.
        DataError: If out_dir cannot be written.

    Returns:
        Dict[str, str]: Kind of file to path.
    """
    if len(rows) == 0:
        raise ValueError("no result rows to emit")
    _ensure_dir(out_dir)
    written = {"results": path.join(out_dir, "results.csv")}
    try:
        _write(results_frame(rows), written["results"])
        for dataset in sorted({row.dataset for row in rows}):
            key = f"aggregate_{dataset}"
            written[key] = path.join(out_dir, f"{key}.csv")
            _write(aggregate([row for row in rows if row.dataset == dataset]), written[key])
        written["table1"] = write_table1(out_dir)
    except OSError as error:
        LOGGER.error("Cannot write to %s: %s", out_dir, error)
        raise DataError(f"cannot write results to {out_dir}: {error}") from error
    return written
