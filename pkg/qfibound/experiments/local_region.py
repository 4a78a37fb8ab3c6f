"""
Local hypercube region around a trained point and the constants of the local bound
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qfibound.bounds.generalization import local_log_volume
from qfibound.circuit.spec import THETA_BOUND, CircuitSpec
from qfibound.experiments import LOGGER
from qfibound.fisher.quantum import QfimLandscape

RADIUS_OFFSET = 1e-3
BOUNDARY_SAMPLES = 16
INTERIOR_SAMPLES = 32
LIPSCHITZ_SAMPLES = 32


class RegionCriterion(Enum):
    DETERMINANT = "determinant"
    MIN_EIGENVALUE = "min_eigenvalue"


@dataclass(frozen=True)
class LocalRegion:
    """
    Hypercube of half-width radius_delta around center. radius_delta is a length in
    parameter space and is unrelated to the confidence level of a bound.
    """
    center: np.ndarray
    radius_delta: float
    log_m_loc: float
    L_loc: float = math.nan
    alpha: float = 0.5
    degenerate: bool = False

    def __post_init__(self):
        if not self.alpha < self.radius_delta <= THETA_BOUND + 1e-12:
            raise ValueError(f"radius {self.radius_delta} outside ({self.alpha}, 2pi]")

    @property
    def d(self) -> int:
        return int(np.size(self.center))

    @property
    def log_V_loc(self) -> float:
        return local_log_volume(self.d, self.radius_delta)

    def contains(self, theta) -> bool:
        return bool(np.all(np.abs(np.asarray(theta) - self.center) <= self.radius_delta + 1e-12))


def _features(batch):
    return getattr(batch, "features", batch)


def boundary_points(center: np.ndarray, delta: float, n: int, rng: np.random.Generator, space) -> np.ndarray:
    """
    n points on the surface of the hypercube: uniform inside, then one random coordinate
    pushed to -delta or +delta. Points are clipped to the parameter space.
    """
    offsets = rng.uniform(-delta, delta, size=(n, center.size))
    faces = rng.integers(center.size, size=n)
    offsets[np.arange(n), faces] = rng.choice((-delta, delta), size=n)
    return space.clip(center + offsets)


def interior_points(center: np.ndarray, delta: float, n: int, rng: np.random.Generator, space) -> np.ndarray:
    return space.clip(center + rng.uniform(-delta, delta, size=(n, center.size)))


def boundary_criterion(quantity, center, delta: float, alpha: float, reference: float,
                       rng: np.random.Generator, space, n_samples: int = BOUNDARY_SAMPLES) -> bool:
    """
    True while the smallest sampled boundary value of the log quantity stays above
    ln(alpha) + reference, a fraction alpha of its value at the center.
    """
    points = boundary_points(center, delta, n_samples, rng, space)
    lowest = min(quantity(point) for point in points)
    LOGGER.debug("Region radius %.6g: boundary min %.6g, threshold %.6g", delta, lowest, math.log(alpha) + reference)
    return lowest >= math.log(alpha) + reference


def local_region_search(theta_hat, spec: CircuitSpec, batch, alpha: float = 0.5, *,
                        rng: np.random.Generator = None, seed: int = 0,
                        boundary_samples: int = BOUNDARY_SAMPLES, interior_samples: int = INTERIOR_SAMPLES,
                        criterion: RegionCriterion = RegionCriterion.DETERMINANT,
                        landscape=None) -> LocalRegion:
    """
    Grows a hypercube around theta_hat while the QFIM quantity on its boundary stays
    above alpha times its value at theta_hat.

    The radius starts at alpha + 1e-3 and doubles while the criterion holds, then is
    clamped to 2pi. If the criterion already fails at the starting radius the region
    keeps that radius and is flagged degenerate.

    Args:
        theta_hat: Trained parameters inside the parameter space.
        spec (CircuitSpec): Circuit.
        batch: Batch (or feature matrix) the QFIM is averaged over.
        alpha (float, optional): Fraction of the center value. Defaults to 0.5.
        rng (np.random.Generator, optional): Sampling stream. Defaults to one seeded with seed.
        seed (int, optional): Seed used when rng is not given.
        boundary_samples (int, optional): Points per boundary check.
        interior_samples (int, optional): Interior points for log_m_loc.
        criterion (RegionCriterion, optional): log sqrt det or log of the minimal eigenvalue.
        landscape (optional): Object with log_sqrt_det and log_min_eigenvalue, built from
            spec and batch when omitted.

    Raises:
        ValueError: If theta_hat is outside the parameter space or alpha is invalid.

    Returns:
        LocalRegion: Region with log_m_loc filled in and L_loc unset.
    """
    space = spec.parameter_space()
    center = np.asarray(theta_hat, dtype=float)
    if center.shape != (spec.d,) or not space.contains(center):
        raise ValueError(f"theta_hat must be a point of the {spec.d}-dimensional parameter space")
    start = alpha + RADIUS_OFFSET
    if not 0.0 < alpha or start > THETA_BOUND:
        raise ValueError(f"alpha must be in (0, 2pi - {RADIUS_OFFSET}], got {alpha}")
    rng = np.random.default_rng(seed) if rng is None else rng
    landscape = QfimLandscape(spec, _features(batch)) if landscape is None else landscape
    quantity = landscape.log_sqrt_det if criterion is RegionCriterion.DETERMINANT else landscape.log_min_eigenvalue
    reference = quantity(center)

    delta = start
    degenerate = not boundary_criterion(quantity, center, delta, alpha, reference, rng, space, boundary_samples)
    if degenerate:
        LOGGER.warning("Local region criterion fails at the smallest radius %.4g, keeping it", delta)
    else:
        while delta < THETA_BOUND:
            grown = min(2.0 * delta, THETA_BOUND)
            if not boundary_criterion(quantity, center, grown, alpha, reference, rng, space, boundary_samples):
                break
            delta = grown

    points = np.vstack([center[None, :], interior_points(center, delta, interior_samples, rng, space)])
    log_m_loc = min(landscape.log_sqrt_det(point) for point in points)
    LOGGER.debug("Local region radius %.6g, log m_loc %.6g", delta, log_m_loc)
    return LocalRegion(center.copy(), delta, log_m_loc, alpha=alpha, degenerate=degenerate)


def local_lipschitz(theta_hat, region: LocalRegion, spec: CircuitSpec, batch, K: int = LIPSCHITZ_SAMPLES,
                    seed: int = 0, *, rng: np.random.Generator = None, landscape=None) -> float:
    """
    Largest model-gradient norm over the batch and over K points of the region, the
    center being one of them.

    Args:
        theta_hat: Center of the region.
        region (LocalRegion): Region to sample.
        spec (CircuitSpec): Circuit.
        batch: Batch (or feature matrix).
        K (int, optional): Number of points including the center. Defaults to 32.
        seed (int, optional): Seed used when rng is not given.

    Returns:
        float: Sampled local Lipschitz constant.
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    rng = np.random.default_rng(seed) if rng is None else rng
    landscape = QfimLandscape(spec, _features(batch)) if landscape is None else landscape
    center = np.asarray(theta_hat, dtype=float)
    points = np.vstack([center[None, :],
                        interior_points(center, region.radius_delta, K - 1, rng, spec.parameter_space())])
    return max(landscape.max_gradient_norm(point) for point in points)
