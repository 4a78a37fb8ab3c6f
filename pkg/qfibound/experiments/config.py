"""
Experiment configuration read from a JSON document
"""

import json
from dataclasses import asdict, dataclass, fields
from os import path
from typing import Tuple

from qfibound.circuit.spec import CircuitSpec, NoiseModel, RotationKind
from qfibound.experiments import LOGGER
from qfibound.experiments.local_region import RegionCriterion
from qfibound.training.trainer import TrainConfig
from qfibound.util.errors import UsageError

DATA_DIR = path.join("res", "data")
OUT_DIR = "results"
DATASETS = ("iris", "digits")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Grid of (layers, noise rate, training size) cells, each trained n_runs times.
    """
    dataset: str = "iris"
    n_qubits: int = 2
    layers: Tuple[int, ...] = (2,)
    noise_rates: Tuple[float, ...] = (0.05, 0.1, 0.5)
    train_sizes: Tuple[int, ...] = (20, 40, 60, 80)
    epochs: int = 20
    n_runs: int = 3
    base_seed: int = 0
    conf_delta: float = 0.01
    alpha: float = 0.5
    learning_rate: float = 0.1
    pinv_cutoff: float = 1e-8
    out_dir: str = OUT_DIR
    data_dir: str = DATA_DIR
    workers: int = 1
    noise_model: str = NoiseModel.GLOBAL.value
    per_layer_noise: bool = False
    rotation: str = RotationKind.EULER_ZYZ.value
    global_samples: int = 64
    boundary_samples: int = 16
    interior_samples: int = 32
    lipschitz_samples: int = 32
    local_criterion: str = RegionCriterion.DETERMINANT.value
    pca_components: int = 8
    test_size: int = 20

    def __post_init__(self):
        for name in ("layers", "noise_rates", "train_sizes"):
            values = getattr(self, name)
            if isinstance(values, (int, float)) or len(values) == 0:
                raise UsageError(f"{name} must be a non-empty list")
            object.__setattr__(self, name, tuple(values))
        if self.dataset not in DATASETS:
            raise UsageError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        if any(layers < 1 for layers in self.layers):
            raise UsageError(f"layer counts must be at least 1, got {self.layers}")
        if any(not 0.0 <= p < 1.0 for p in self.noise_rates):
            raise UsageError(f"noise rates must be in [0, 1), got {self.noise_rates}")
        if any(n < 2 for n in self.train_sizes):
            raise UsageError(f"training sizes must be at least 2, got {self.train_sizes}")
        if self.test_size < 2:
            raise UsageError(f"test_size must be at least 2, got {self.test_size}")
        if not 0.0 < self.conf_delta < 1.0:
            raise UsageError(f"conf_delta must be in (0, 1), got {self.conf_delta}")
        if self.alpha <= 0.0:
            raise UsageError(f"alpha must be positive, got {self.alpha}")
        for name in ("n_qubits", "epochs", "n_runs", "workers", "global_samples", "boundary_samples",
                     "interior_samples", "lipschitz_samples", "pca_components"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be at least 1, got {getattr(self, name)}")
        try:
            NoiseModel(self.noise_model)
            RotationKind(self.rotation)
            RegionCriterion(self.local_criterion)
        except ValueError as error:
            raise UsageError(str(error)) from error

    def circuit(self, n_layers: int, noise_rate: float) -> CircuitSpec:
        return CircuitSpec(self.n_qubits, n_layers, noise_rate, RotationKind(self.rotation),
                           NoiseModel(self.noise_model), self.per_layer_noise)

    def train_config(self, seed: int, noise_rate: float) -> TrainConfig:
        """Single-run training settings for one grid cell."""
        return TrainConfig(self.epochs, self.learning_rate, self.pinv_cutoff, 1, seed, noise_rate)

    @property
    def criterion(self) -> RegionCriterion:
        return RegionCriterion(self.local_criterion)

    @property
    def grid_size(self) -> int:
        return len(self.layers) * len(self.noise_rates) * len(self.train_sizes)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """
        Builds a config from a parsed JSON object.

        Raises:
            UsageError: On unknown keys or invalid values.
        """
        if not isinstance(data, dict):
            raise UsageError("experiment config must be a JSON object")
        known = {field.name for field in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as error:
            raise UsageError(f"invalid config value: {error}") from error

    def as_dict(self) -> dict:
        data = asdict(self)
        for name in ("layers", "noise_rates", "train_sizes"):
            data[name] = list(data[name])
        return data


def load_config(file_path: str) -> ExperimentConfig:
    """
    Reads and validates an experiment config.

    Args:
        file_path (str): Path of the JSON document.

    Raises:
        UsageError: If the file is missing, is not valid JSON or fails validation.

    Returns:
        ExperimentConfig: The config.
    """
    if not path.isfile(file_path):
        raise UsageError(f"config file {file_path} not found")
    with open(file_path, "r", encoding="utf-8") as file:
        try:
            data = json.load(file)
        except json.JSONDecodeError as error:
            raise UsageError(f"config file {file_path} is not valid JSON: {error}") from error
    config = ExperimentConfig.from_dict(data)
    LOGGER.info("Loaded config %s: %s cells x %s runs", file_path, config.grid_size, config.n_runs)
    return config
