"""
Experiment grid: training, global and local bounds and effective dimension for every cell
"""

import math
from dataclasses import dataclass, fields
from typing import List

import numpy as np

from qfibound import SLD_FLOOR
from qfibound.bounds.generalization import BoundInputs, effdim_bound, generalization_bound, local_bound
from qfibound.experiments import LOGGER
from qfibound.experiments.config import ExperimentConfig
from qfibound.experiments.datasets import Dataset, DatasetCache, prepare_split
from qfibound.experiments.local_region import local_lipschitz, local_region_search
from qfibound.fisher.effective_dimension import effective_dim_ipr, effective_dim_rank
from qfibound.fisher.quantum import QfimLandscape
from qfibound.threading.worker_manager import WorkerManager
from qfibound.threading.worker_thread import Worker
from qfibound.training.trainer import train

GRADIENT_FLOOR = 1e-12


@dataclass(frozen=True)
class ResultRow:
    """
    Outcome of one training run of one grid cell.
    """
    dataset: str
    run: int
    seed: int
    n_layers: int
    p: float
    N_train: int
    train_risk: float
    test_risk: float
    gap: float
    global_bound: float
    local_bound: float
    effdim_bound: float
    radius_delta: float
    log_m_loc: float
    L_loc: float
    d_eff_ipr: float
    d_eff_rank: float = math.nan
    ordering_note: str = ""
    error: str = ""

    @classmethod
    def columns(cls) -> List[str]:
        return [field.name for field in fields(cls)]

    @classmethod
    def failed(cls, dataset: str, run: int, seed: int, n_layers: int, p: float, N_train: int,
               error: BaseException) -> "ResultRow":
        nan = math.nan
        return cls(dataset, run, seed, n_layers, p, N_train, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                   error=f"{type(error).__name__}: {error}")

    @property
    def ok(self) -> bool:
        return not self.error


def cell_rng(seed: int, n_layers: int, p: float, n_train: int) -> np.random.Generator:
    """Random stream owned by one cell and run."""
    return np.random.default_rng([seed, n_layers, n_train, int(round(p * 1e6))])


def global_constants(landscape: QfimLandscape, space, n_samples: int, rng: np.random.Generator):
    """
    log m and L from uniform samples of the parameter space.

    Returns:
        tuple: (smallest floored log sqrt det, largest model-gradient norm).
    """
    log_m, lipschitz = math.inf, 0.0
    for theta in space.sample(rng, n_samples):
        log_m = min(log_m, landscape.log_sqrt_det(theta))
        lipschitz = max(lipschitz, landscape.max_gradient_norm(theta))
    return log_m, lipschitz


def ordering_note(inputs: BoundInputs, log_V_loc: float, log_m_loc: float, L_loc: float) -> str:
    """Names the local constants that are worse than their global counterparts."""
    reversed_constants = []
    if log_V_loc > inputs.log_V_Theta + 1e-12:
        reversed_constants.append("log_V_loc")
    if log_m_loc < inputs.log_m:
        reversed_constants.append("log_m_loc")
    if L_loc > inputs.L_f_p:
        reversed_constants.append("L_loc")
    return ";".join(reversed_constants)


def run_cell(dataset: Dataset, config: ExperimentConfig, n_layers: int, p: float, n_train: int, run: int) -> ResultRow:
    """
    Trains one run of one cell and evaluates all three bounds at the trained point.

    Args:
        dataset (Dataset): Loaded dataset.
        config (ExperimentConfig): Experiment settings.
        n_layers (int): Circuit depth.
        p (float): Noise rate.
        n_train (int): Training rows.
        run (int): Run index, the seed is base_seed + run.

    Returns:
        ResultRow: The row.
    """
    seed = config.base_seed + run
    LOGGER.info("Cell %s layers, p = %s, N = %s, run %s started", n_layers, p, n_train, run)
    split = prepare_split(dataset, n_train, seed, config.pca_components, config.test_size)
    spec = config.circuit(n_layers, p)
    outcome = train(split, spec, config.train_config(seed, p)).runs[0]

    rng = cell_rng(seed, n_layers, p, n_train)
    space = spec.parameter_space()
    landscape = QfimLandscape(spec, split.train.features)
    sampled_log_m, sampled_lipschitz = global_constants(landscape, space, config.global_samples, rng)

    region = local_region_search(outcome.theta_hat, spec, split.train, config.alpha, rng=rng,
                                 boundary_samples=config.boundary_samples,
                                 interior_samples=config.interior_samples,
                                 criterion=config.criterion, landscape=landscape)
    L_loc = max(local_lipschitz(outcome.theta_hat, region, spec, split.train, config.lipschitz_samples,
                                rng=rng, landscape=landscape), GRADIENT_FLOOR)
    # the region lies inside the parameter space, so its samples count towards the global extremes
    log_m = min(sampled_log_m, region.log_m_loc)
    lipschitz = max(sampled_lipschitz, L_loc)
    inputs = BoundInputs(spec.d, len(split.train), config.conf_delta, space.log_volume, log_m,
                         max(lipschitz, GRADIENT_FLOOR), outcome.train_risk)
    global_report = generalization_bound(inputs)
    local_report = local_bound(inputs, region.log_V_loc, region.log_m_loc, L_loc)

    qfim = landscape.geometry(outcome.theta_hat).qfim
    rank = effective_dim_rank(qfim)
    try:
        d_eff = effective_dim_ipr(qfim.eigenvalues, tol=SLD_FLOOR)
    except ValueError:
        LOGGER.warning("QFIM vanishes at the trained point, taking d_eff = 1")
        d_eff = 1.0
    d_eff = min(max(d_eff, 1.0), float(spec.d))
    effdim_report = effdim_bound(inputs, d_eff, local_report.c_prime)

    note = ordering_note(inputs, region.log_V_loc, region.log_m_loc, L_loc)
    if note:
        LOGGER.warning("Local constants %s are worse than the global ones (layers %s, p %s, N %s, run %s)",
                       note, n_layers, p, n_train, run)
    LOGGER.info("Cell %s layers, p = %s, N = %s, run %s: gap %.4f, global %.4f, local %.4f",
                n_layers, p, n_train, run, outcome.gap, global_report.bound, local_report.bound)
    return ResultRow(
        dataset=dataset.name,
        run=run,
        seed=seed,
        n_layers=n_layers,
        p=p,
        N_train=n_train,
        train_risk=outcome.train_risk,
        test_risk=outcome.test_risk,
        gap=outcome.gap,
        global_bound=global_report.bound,
        local_bound=local_report.bound,
        effdim_bound=effdim_report.bound,
        radius_delta=region.radius_delta,
        log_m_loc=region.log_m_loc,
        L_loc=L_loc,
        d_eff_ipr=d_eff,
        d_eff_rank=float(rank),
        ordering_note=note,
    )


class ExperimentCell(Worker):
    """
    Worker thread for one run of one grid cell.
    """

    def __init__(self, dataset: Dataset, config: ExperimentConfig, n_layers: int, p: float, n_train: int, run: int):
        super().__init__(name=f"ExperimentCell-L{n_layers}-p{p}-N{n_train}-r{run}")
        self.dataset = dataset
        self.config = config
        self.n_layers = n_layers
        self.p = p
        self.n_train = n_train
        self.run_index = run

    def work(self):
        return run_cell(self.dataset, self.config, self.n_layers, self.p, self.n_train, self.run_index)

    def row(self) -> ResultRow:
        """The result, or an error row if the cell failed."""
        if self.error is None:
            return self.result
        return ResultRow.failed(self.dataset.name, self.run_index, self.config.base_seed + self.run_index,
                                self.n_layers, self.p, self.n_train, self.error)


def run_experiment(config: ExperimentConfig) -> List[ResultRow]:
    """
    Runs every (layers, noise rate, training size, run) of the grid.

    A failing cell becomes an error row and the remaining cells still run.

    Args:
        config (ExperimentConfig): Experiment settings.

    Raises:
        DataError: If the dataset cannot be loaded.

    Returns:
        List[ResultRow]: Rows in grid order, len = grid size x n_runs.
    """
    dataset = DatasetCache().get(config.dataset, config.data_dir)
    cells = [
        ExperimentCell(dataset, config, n_layers, p, n_train, run)
        for n_layers in config.layers
        for p in config.noise_rates
        for n_train in config.train_sizes
        for run in range(config.n_runs)
    ]
    LOGGER.info("Running %s cells on %s with %s workers", len(cells), config.dataset, config.workers)
    WorkerManager().run_all(cells, config.workers)
    rows = [cell.row() for cell in cells]
    failed = sum(1 for row in rows if not row.ok)
    if failed:
        LOGGER.error("%s of %s cells failed", failed, len(rows))
    return rows
