"""
Effective dimension of a Fisher spectrum: rank, inverse participation ratio and threshold counts
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from qfibound import SLD_FLOOR
from qfibound.fisher import LOGGER
from qfibound.fisher.matrix import PSD_EIGEN_TOL, FisherMatrix


def effective_dim_ipr(eigenvalues: Sequence[float], tol: float = 0.0) -> float:
    """
    (sum l)**2 / sum l**2 of a nonnegative spectrum.

    Args:
        eigenvalues (Sequence[float]): Spectrum. Entries above -1e-8 are clipped to zero.
        tol (float, optional): Eigenvalues at or below tol count as zero. Defaults to 0.

    Raises:
        ValueError: If an eigenvalue is clearly negative or every eigenvalue is zero.

    Returns:
        float: A value in [1, len(eigenvalues)].
    """
    values = np.asarray(eigenvalues, dtype=float)
    if values.size == 0 or np.min(values) < -PSD_EIGEN_TOL:
        raise ValueError("spectrum must be nonempty and nonnegative")
    values = np.where(values > tol, values, 0.0)
    squares = float(np.sum(values ** 2))
    if squares == 0.0:
        raise ValueError("spectrum is all zero")
    return float(np.sum(values) ** 2 / squares)


def effective_dim_rank(fisher: Union[FisherMatrix, Iterable[FisherMatrix]], tol: float = SLD_FLOOR) -> int:
    """
    Number of eigenvalues above tol, maximised over a sample of Fisher matrices.

    Args:
        fisher (FisherMatrix | Iterable[FisherMatrix]): One matrix or a sample over theta.
        tol (float, optional): Eigenvalue tolerance. Defaults to 1e-10.

    Returns:
        int: The rank.
    """
    matrices = [fisher] if isinstance(fisher, FisherMatrix) else list(fisher)
    return max(int(np.sum(f.eigenvalues > tol)) for f in matrices)


def effective_dim_threshold(spectra: Sequence[Sequence[float]], alpha: float) -> int:
    """
    Largest r with the r-th largest eigenvalue >= alpha in every spectrum, 0 if none.

    Args:
        spectra (Sequence[Sequence[float]]): Spectra sorted in descending order.
        alpha (float): Positive threshold.

    Raises:
        ValueError: If no spectra are given or alpha is not positive.

    Returns:
        int: The threshold dimension.
    """
    if len(spectra) == 0:
        raise ValueError("at least one spectrum is required")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    result = None
    for spectrum in spectra:
        values = np.asarray(spectrum, dtype=float)
        if np.any(np.diff(values) > 0):
            raise ValueError("spectra must be sorted in descending order")
        count = int(np.sum(values >= alpha))
        result = count if result is None else min(result, count)
    return result


@dataclass(frozen=True)
class EffectiveDimension:
    rank_based: int
    ipr_based: float
    threshold_based: int
    alpha: float
    d: int

    def __post_init__(self):
        if self.rank_based > self.d:
            raise ValueError("rank exceeds the parameter dimension")


def summarize_spectra(matrices: Sequence[FisherMatrix], alpha: float, tol: float = SLD_FLOOR) -> EffectiveDimension:
    """
    Effective dimensions over a sample of Fisher matrices. The IPR is the largest
    over the sample so it stays comparable with the max-over-sample rank.

    Args:
        matrices (Sequence[FisherMatrix]): Fisher matrices at sampled parameters.
        alpha (float): Threshold for the threshold-based dimension.
        tol (float, optional): Rank tolerance. Defaults to 1e-10.

    Returns:
        EffectiveDimension: The summary.
    """
    if not matrices:
        raise ValueError("at least one Fisher matrix is required")
    rank = effective_dim_rank(matrices, tol)
    iprs = [effective_dim_ipr(f.eigenvalues, tol) for f in matrices if f.eigenvalues[-1] > tol]
    ipr = max(iprs) if iprs else 0.0
    threshold = effective_dim_threshold([f.descending() for f in matrices], alpha)
    LOGGER.debug("Effective dimension: rank %s, ipr %.4f, threshold %s", rank, ipr, threshold)
    return EffectiveDimension(rank, ipr, threshold, alpha, matrices[0].d)
