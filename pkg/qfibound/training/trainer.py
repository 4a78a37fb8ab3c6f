"""
Multi-run natural gradient training with risk and generalization-gap accounting
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from qfibound.circuit.spec import CircuitSpec
from qfibound.fisher.quantum import local_geometry
from qfibound.gradients.param_shift import GradientVector
from qfibound.threading.worker_manager import WorkerManager
from qfibound.threading.worker_thread import Worker
from qfibound.training import LOGGER
from qfibound.training.loss import Batch, bounded_loss, gradient_from_values, mse_loss
from qfibound.training.optimizer import natural_gradient_step
from qfibound.util.errors import NumericalError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.1
    pinv_cutoff: float = 1e-8
    n_runs: int = 3
    base_seed: int = 0
    noise_rate: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be at least 1, got {self.epochs}")
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be at least 1, got {self.n_runs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.pinv_cutoff <= 0:
            raise ValueError(f"pinv_cutoff must be positive, got {self.pinv_cutoff}")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError(f"noise_rate must be in [0, 1), got {self.noise_rate}")


@dataclass(frozen=True)
class DatasetSplit:
    """
    Disjoint training and test batches. Row indices into the source dataset are
    optional and, when given, are checked for overlap.
    """
    train: Batch
    test: Batch
    train_indices: Tuple[int, ...] = field(default=None, repr=False)
    test_indices: Tuple[int, ...] = field(default=None, repr=False)

    def __post_init__(self):
        if self.train_indices is not None and self.test_indices is not None:
            if set(self.train_indices) & set(self.test_indices):
                raise ValueError("invalid split: train and test rows overlap")
            if len(self.train_indices) != len(self.train) or len(self.test_indices) != len(self.test):
                raise ValueError("invalid split: index counts do not match the batches")


@dataclass(frozen=True)
class RunResult:
    run: int
    seed: int
    theta_hat: np.ndarray
    loss_curve: np.ndarray
    best_epoch: int
    train_risk: float
    test_risk: float

    @property
    def gap(self) -> float:
        return abs(self.test_risk - self.train_risk)


@dataclass(frozen=True)
class TrainResult:
    runs: Tuple[RunResult, ...]

    @property
    def theta_hat(self) -> List[np.ndarray]:
        return [run.theta_hat for run in self.runs]

    @property
    def loss_curve(self) -> List[np.ndarray]:
        return [run.loss_curve for run in self.runs]

    @property
    def train_risk(self) -> np.ndarray:
        return np.array([run.train_risk for run in self.runs])

    @property
    def test_risk(self) -> np.ndarray:
        return np.array([run.test_risk for run in self.runs])

    @property
    def gap(self) -> np.ndarray:
        return np.array([run.gap for run in self.runs])


def train_run(split: DatasetSplit, spec: CircuitSpec, config: TrainConfig, run: int) -> RunResult:
    """
    One seeded training run of full-batch natural gradient descent.

    The initial point is uniform in [-2pi, 2pi]^d with seed base_seed + run. The
    returned parameters are the iterate with the lowest training loss.

    Args:
        split (DatasetSplit): Data.
        spec (CircuitSpec): Circuit at the training noise rate.
        config (TrainConfig): Hyperparameters.
        run (int): Run index.

    Raises:
        NumericalError: If the loss stops being finite.

    Returns:
        RunResult: Outcome of the run.
    """
    seed = config.base_seed + run
    rng = np.random.default_rng(seed)
    theta = spec.parameter_space().sample(rng)
    train = split.train
    curve = np.empty(config.epochs)
    best_loss = np.inf
    theta_hat = theta
    best_epoch = 0
    for epoch in range(config.epochs):
        geometry = local_geometry(train.features, theta, spec)
        grad = GradientVector(gradient_from_values(geometry.values, geometry.gradients, train.labels))
        theta = natural_gradient_step(theta, grad.values, geometry.qfim, config.learning_rate, config.pinv_cutoff)
        loss = mse_loss(theta, train, spec)
        if not np.isfinite(loss):
            raise NumericalError(f"training loss became {loss} in epoch {epoch} of run {run}")
        curve[epoch] = loss
        if loss < best_loss:
            best_loss, theta_hat, best_epoch = loss, theta.copy(), epoch
        LOGGER.debug("Run %s epoch %s: loss %.6f", run, epoch, loss)
    train_risk = bounded_loss(theta_hat, train, spec)
    test_risk = bounded_loss(theta_hat, split.test, spec)
    LOGGER.debug("Run %s finished: train risk %.4f, test risk %.4f", run, train_risk, test_risk)
    curve.flags.writeable = False
    return RunResult(run, seed, theta_hat, curve, best_epoch, train_risk, test_risk)


class TrainingRun(Worker):
    """
    Worker thread for one training run.
    """

    def __init__(self, split: DatasetSplit, spec: CircuitSpec, config: TrainConfig, run: int):
        super().__init__(name=f"TrainingRun-{run}")
        self.split = split
        self.spec = spec
        self.config = config
        self.run_index = run

    def work(self):
        return train_run(self.split, self.spec, self.config, self.run_index)


def train(split: DatasetSplit, spec: CircuitSpec, config: TrainConfig, max_workers: int = 1) -> TrainResult:
    """
    Trains config.n_runs independent runs at config.noise_rate.

    Args:
        split (DatasetSplit): Disjoint train and test data.
        spec (CircuitSpec): Circuit. Its noise rate is replaced by config.noise_rate.
        config (TrainConfig): Hyperparameters.
        max_workers (int, optional): Runs executed concurrently. Defaults to 1.

    Returns:
        TrainResult: Runs ordered by run index.
    """
    if not isinstance(split, DatasetSplit):
        raise ValueError("invalid split")
    spec = spec.with_noise(config.noise_rate)
    workers = [TrainingRun(split, spec, config, run) for run in range(config.n_runs)]
    WorkerManager().run_all(workers, max_workers)
    for worker in workers:
        if worker.error is not None:
            raise worker.error
    LOGGER.info("Trained %s runs of %s epochs at p = %s", config.n_runs, config.epochs, config.noise_rate)
    return TrainResult(tuple(worker.result for worker in workers))
