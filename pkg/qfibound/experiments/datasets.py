"""
Dataset ingestion, PCA, feature scaling and stratified train/test splits
"""

import re
from dataclasses import dataclass
from os import makedirs, path
from threading import Lock
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from sklearn import datasets as sklearn_datasets
from sklearn.decomposition import PCA
from sklearn.model_selection import train_test_split

from qfibound.experiments import LOGGER
from qfibound.training.loss import Batch
from qfibound.training.trainer import DatasetSplit
from qfibound.util.errors import DataError

IRIS_COLUMNS = ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"]
DIGITS_COLUMNS = [f"p{i}" for i in range(64)] + ["label"]
BINARY_CLASSES = (0, 1)


@dataclass(frozen=True)
class Dataset:
    """
    Feature matrix with binary labels in {-1, +1}.
    """
    name: str
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=float).reshape(-1)
        if features.ndim != 2 or features.shape[0] != labels.size:
            raise ValueError(f"{features.shape} features do not match {labels.size} labels")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.labels.size


def _read_csv(file_path: str, columns: List[str]) -> pd.DataFrame:
    """
    Reads a numeric CSV with an exact header. Line numbers in errors count the header as line 1.
    """
    if not path.isfile(file_path):
        raise DataError(f"dataset file {file_path} not found")
    try:
        frame = pd.read_csv(file_path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as error:
        raise DataError(f"empty dataset: {file_path}") from error
    except pd.errors.ParserError as error:
        match = re.search(r"line (\d+)", str(error))
        raise DataError(f"malformed row in {file_path}: {error}", int(match.group(1)) if match else None) from error
    if list(frame.columns) != columns:
        raise DataError(f"unexpected header in {file_path}: {list(frame.columns)}", 1)
    if frame.empty:
        raise DataError(f"empty dataset: {file_path}")
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    malformed = numeric.isna().any(axis=1).to_numpy()
    if malformed.any():
        row = int(np.argmax(malformed))
        raise DataError(f"malformed row in {file_path}: {list(frame.iloc[row])}", row + 2)
    return numeric


def _check_integers(values: pd.Series, allowed: range, file_path: str, what: str):
    valid = (values == values.round()) & values.between(allowed.start, allowed.stop - 1)
    if not valid.all():
        row = int(np.argmax(~valid.to_numpy()))
        raise DataError(f"invalid {what} {values.iloc[row]} in {file_path}", row + 2)


def _binary(name: str, features: np.ndarray, classes: np.ndarray, file_path: str) -> Dataset:
    keep = np.isin(classes, BINARY_CLASSES)
    present = set(np.unique(classes[keep]).astype(int))
    if len(present) < 2:
        LOGGER.error("%s holds classes %s, need both of %s", file_path, sorted(present), BINARY_CLASSES)
        raise DataError(f"fewer than 2 classes present in {file_path}")
    labels = np.where(classes[keep] == BINARY_CLASSES[1], 1.0, -1.0)
    LOGGER.info("Loaded %s: %s rows, %s features", name, int(keep.sum()), features.shape[1])
    return Dataset(name, features[keep], labels)


def load_iris(file_path: str) -> Dataset:
    """
    Loads the first two Iris classes, class 0 as -1 and class 1 as +1.

    Args:
        file_path (str): CSV with header sepal_length,sepal_width,petal_length,petal_width,class.

    Raises:
        DataError: If the file is missing, empty, malformed or lacks one of the two classes.

    Returns:
        Dataset: 4-feature binary dataset.
    """
    frame = _read_csv(file_path, IRIS_COLUMNS)
    _check_integers(frame["class"], range(0, 3), file_path, "class")
    return _binary("iris", frame[IRIS_COLUMNS[:-1]].to_numpy(dtype=float), frame["class"].to_numpy(), file_path)


def load_digits(file_path: str) -> Dataset:
    """
    Loads the 8x8 digits 0 and 1, digit 0 as -1 and digit 1 as +1.

    Args:
        file_path (str): CSV with header p0,...,p63,label.

    Raises:
        DataError: If the file is missing, empty, malformed or lacks one of the two digits.

    Returns:
        Dataset: 64-feature binary dataset.
    """
    frame = _read_csv(file_path, DIGITS_COLUMNS)
    _check_integers(frame["label"], range(0, 10), file_path, "label")
    pixels = frame[DIGITS_COLUMNS[:-1]]
    for column in pixels.columns:
        _check_integers(pixels[column], range(0, 17), file_path, "pixel")
    return _binary("digits", pixels.to_numpy(dtype=float), frame["label"].to_numpy(), file_path)


LOADERS = {"iris": load_iris, "digits": load_digits}


def export_bundled_datasets(out_dir: str) -> Dict[str, str]:
    """
    Writes iris.csv and digits.csv from the copies vendored with scikit-learn.

    Args:
        out_dir (str): Target directory, created if missing.

    Returns:
        Dict[str, str]: Dataset name to written path.
    """
    makedirs(out_dir, exist_ok=True)
    iris = sklearn_datasets.load_iris()
    iris_frame = pd.DataFrame(iris.data, columns=IRIS_COLUMNS[:-1])
    iris_frame["class"] = iris.target.astype(int)
    digits = sklearn_datasets.load_digits()
    digits_frame = pd.DataFrame(digits.data.astype(int), columns=DIGITS_COLUMNS[:-1])
    digits_frame["label"] = digits.target.astype(int)

    written = {
        "iris": path.join(out_dir, "iris.csv"),
        "digits": path.join(out_dir, "digits.csv"),
    }
    iris_frame.to_csv(written["iris"], index=False, float_format="%.4f", encoding="utf-8")
    digits_frame.to_csv(written["digits"], index=False, encoding="utf-8")
    LOGGER.info("Wrote %s", ", ".join(written.values()))
    return written


class DatasetCache:
    """
    Process-wide cache of loaded datasets, shared by concurrent experiment cells.
    """

    _instance = None
    _instance_lock = Lock()
    _initialized = False

    def __new__(cls):
        if cls._instance is None:
            with cls._instance_lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            self.__lock = Lock()
            self.__datasets: Dict[Tuple[str, str], Dataset] = {}
            self._initialized = True

    def get(self, name: str, data_dir: str) -> Dataset:
        """
        Returns the named dataset from data_dir/<name>.csv, loading it on first use.

        Raises:
            DataError: If the name is unknown or loading fails.
        """
        if name not in LOADERS:
            raise DataError(f"unknown dataset {name!r}, expected one of {sorted(LOADERS)}")
        file_path = path.join(data_dir, f"{name}.csv")
        key = (name, path.abspath(file_path))
        with self.__lock:
            if key not in self.__datasets:
                self.__datasets[key] = LOADERS[name](file_path)
            return self.__datasets[key]

    def clear(self):
        with self.__lock:
            self.__datasets.clear()


def pca_reduce(features: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Projects mean-centred data onto its top-k principal axes.

    Each axis is signed so that its largest-magnitude entry is positive.

    Args:
        features (np.ndarray): (N, m) data.
        k (int): Number of components.

    Raises:
        ValueError: If k is not in [1, min(N, m)].

    Returns:
        tuple: projected (N, k), projection (m, k) with orthonormal columns, mean (m,).
    """
    features = np.asarray(features, dtype=float)
    if not 1 <= k <= min(features.shape):
        raise ValueError(f"cannot keep {k} components of a {features.shape} matrix")
    pca = PCA(n_components=k, svd_solver="full")
    pca.fit(features)
    projection = pca.components_.T.copy()
    pivots = np.argmax(np.abs(projection), axis=0)
    signs = np.sign(projection[pivots, np.arange(k)])
    projection *= np.where(signs == 0, 1.0, signs)
    mean = pca.mean_.copy()
    return (features - mean) @ projection, projection, mean


def pca_project(features: np.ndarray, projection: np.ndarray, mean: np.ndarray) -> np.ndarray:
    """Applies a projection fitted by pca_reduce to new rows."""
    return (np.asarray(features, dtype=float) - mean) @ projection


class FeatureScaler:
    """
    Per-column min-max scaling onto [0, pi], fitted on one matrix and applied to others.
    """

    def __init__(self, upper: float = np.pi):
        self.upper = upper
        self.minimum = None
        self.span = None

    def fit(self, features: np.ndarray) -> "FeatureScaler":
        features = np.asarray(features, dtype=float)
        self.minimum = features.min(axis=0)
        self.span = features.max(axis=0) - self.minimum
        return self

    def transform(self, features: np.ndarray) -> np.ndarray:
        """Scales and clips to [0, pi]. Columns that were constant when fitted map to 0."""
        if self.minimum is None:
            raise ValueError("scaler has not been fitted")
        features = np.asarray(features, dtype=float)
        constant = self.span == 0.0
        span = np.where(constant, 1.0, self.span)
        scaled = (features - self.minimum) / span * self.upper
        scaled[:, constant] = 0.0
        return np.clip(scaled, 0.0, self.upper)


def scale_features(features: np.ndarray, upper: float = np.pi) -> np.ndarray:
    """Min-max scales every column of one matrix onto [0, upper]."""
    return FeatureScaler(upper).fit(features).transform(features)


def _stratified_subset(indices: np.ndarray, labels: np.ndarray, size, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    if size == len(indices):
        return indices, indices[:0]
    return train_test_split(indices, train_size=size, stratify=labels[indices], random_state=seed)


def prepare_split(dataset: Dataset, n_train: int = None, seed: int = 0, pca_components: int = None,
                  test_size: int = None) -> DatasetSplit:
    """
    Stratified train/test split followed by PCA (when requested) and scaling fitted on
    the training rows only.

    Without test_size the test set is every row not drawn for training. With test_size a
    held-out test set of that many rows is drawn first from the seed alone, and the
    n_train training rows come from what is left, so splits of one seed share their test
    set whatever n_train is.

    Args:
        dataset (Dataset): Source data.
        n_train (int, optional): Training rows. Defaults to half the dataset, or to every
            row outside the held-out set when test_size is given.
        seed (int, optional): Split seed. Defaults to 0.
        pca_components (int, optional): PCA size, None to keep the raw features.
        test_size (int, optional): Rows of the held-out test set.

    Raises:
        ValueError: If the split cannot be made.

    Returns:
        DatasetSplit: Scaled, disjoint train and test batches.
    """
    indices = np.arange(len(dataset))
    if test_size is None:
        train_size = 0.5 if n_train is None else int(n_train)
        if n_train is not None and not 0 < train_size < len(dataset):
            raise ValueError(f"cannot draw {n_train} training rows from {len(dataset)}")
        train_idx, test_idx = train_test_split(indices, train_size=train_size, stratify=dataset.labels,
                                               random_state=seed)
    else:
        if not 2 <= test_size < len(dataset):
            raise ValueError(f"cannot hold out {test_size} test rows from {len(dataset)}")
        test_idx, pool = _stratified_subset(indices, dataset.labels, int(test_size), seed)
        train_size = len(pool) if n_train is None else int(n_train)
        if not 0 < train_size <= len(pool):
            raise ValueError(f"cannot draw {n_train} training rows from the {len(pool)} rows outside the test set")
        train_idx, _ = _stratified_subset(pool, dataset.labels, train_size, seed)
    train_idx = np.sort(train_idx)
    test_idx = np.sort(test_idx)
    train_x = dataset.features[train_idx]
    test_x = dataset.features[test_idx]
    if pca_components is not None and pca_components < train_x.shape[1]:
        train_x, projection, mean = pca_reduce(train_x, pca_components)
        test_x = pca_project(test_x, projection, mean)
    scaler = FeatureScaler().fit(train_x)
    return DatasetSplit(
        Batch(scaler.transform(train_x), dataset.labels[train_idx]),
        Batch(scaler.transform(test_x), dataset.labels[test_idx]),
        tuple(int(i) for i in train_idx),
        tuple(int(i) for i in test_idx),
    )
