"""
Covering-number, Rademacher and generalization bounds in closed form
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from qfibound.bounds import LOGGER

TABLE1_SLACK = 0.05
TABLE1_DIMENSIONS = (1, 10, 100, 1000, 10000, 50000, 100000)
TABLE1_N = (8, 13, 102, 1002, 10002, 50002, 100002)
TABLE1_DELTA = 0.005


class BoundVariant(Enum):
    GLOBAL = "global"
    LOCAL = "local"
    EFFECTIVE_DIMENSION = "effective_dimension"


@dataclass(frozen=True)
class BoundInputs:
    """
    Quantities a generalization bound is evaluated from. conf_delta is the confidence
    level and is unrelated to the radius of a local region.
    """
    d: int
    N: int
    conf_delta: float
    log_V_Theta: float
    log_m: float
    L_f_p: float
    empirical_risk: float = 0.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be at least 1, got {self.d}")
        if self.N < 1:
            raise ValueError(f"N must be at least 1, got {self.N}")
        if not 0.0 < self.conf_delta < 1.0:
            raise ValueError(f"conf_delta must be in (0, 1), got {self.conf_delta}")
        if not self.L_f_p > 0.0:
            raise ValueError(f"L_f_p must be positive, got {self.L_f_p}")
        if not 0.0 <= self.empirical_risk <= 1.0:
            raise ValueError(f"empirical_risk must be in [0, 1], got {self.empirical_risk}")


@dataclass(frozen=True)
class BoundReport:
    """
    bound = empirical_risk + complexity_term + confidence_term.
    """
    empirical_risk: float
    complexity_term: float
    confidence_term: float
    c_prime: float
    variant: BoundVariant
    d: float

    @property
    def bound(self) -> float:
        return self.empirical_risk + self.complexity_term + self.confidence_term

    def as_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "d": self.d,
            "c_prime": self.c_prime,
            "empirical_risk": self.empirical_risk,
            "complexity_term": self.complexity_term,
            "confidence_term": self.confidence_term,
            "bound": self.bound,
        }


def unit_ball_volume(d: int) -> Tuple[float, float]:
    """
    Volume pi**(d/2) / Gamma(d/2 + 1) of the unit ball in R^d.

    Args:
        d (int): Dimension, at least 1.

    Raises:
        ValueError: If d < 1.

    Returns:
        tuple: (volume, log volume). The volume underflows to 0 for very large d.
    """
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    log_volume = 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d + 1.0))
    return math.exp(log_volume), log_volume


def covering_log_bound(epsilon: float, d: int, log_V_Theta: float, log_m: float) -> float:
    """
    log N(epsilon) <= C - d ln epsilon with C = log V_Theta - log V_d - log m.

    Raises:
        ValueError: If epsilon is not positive.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    _, log_V_d = unit_ball_volume(d)
    return log_V_Theta - log_V_d - log_m - d * math.log(epsilon)


def complexity_constant(d: int, log_V_Theta: float, log_m: float, L_f_p: float) -> float:
    """
    C' = log V_Theta - log V_d - log m + d log L_f_p, natural logs throughout.

    Args:
        d (int): Parameter dimension.
        log_V_Theta (float): Log volume of the parameter region.
        log_m (float): Log of the minimum sqrt det of the Fisher matrix over the region.
        L_f_p (float): Gradient bound of the perturbed model.

    Raises:
        ValueError: If L_f_p is not positive.

    Returns:
        float: The constant.
    """
    if L_f_p <= 0:
        raise ValueError(f"L_f_p must be positive, got {L_f_p}")
    _, log_V_d = unit_ball_volume(d)
    return log_V_Theta - log_V_d - log_m + d * math.log(L_f_p)


def _exp(value: float) -> float:
    return float(np.exp(np.float64(value))) if value < 709.0 else math.inf


def rademacher_bound(d: float, N: int, c_prime: float) -> float:
    """
    Empirical Rademacher complexity bound 6 sqrt(pi d) exp(C'/d) / sqrt(N).

    Raises:
        ValueError: If N < 1.
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    return 6.0 * math.sqrt(math.pi * d) * _exp(c_prime / d) / math.sqrt(N)


def confidence_term(N: int, conf_delta: float) -> float:
    """3 sqrt(ln(2/delta) / (2N))."""
    return 3.0 * math.sqrt(math.log(2.0 / conf_delta) / (2.0 * N))


def _report(inputs: BoundInputs, d: float, c_prime: float, variant: BoundVariant) -> BoundReport:
    return BoundReport(
        empirical_risk=inputs.empirical_risk,
        complexity_term=2.0 * rademacher_bound(d, inputs.N, c_prime),
        confidence_term=confidence_term(inputs.N, inputs.conf_delta),
        c_prime=c_prime,
        variant=variant,
        d=d,
    )


def generalization_bound(inputs: BoundInputs) -> BoundReport:
    """
    R + 12 sqrt(pi d) exp(C'/d) / sqrt(N) + 3 sqrt(ln(2/delta) / (2N)).

    Args:
        inputs (BoundInputs): Global constants.

    Returns:
        BoundReport: Three-term decomposition.
    """
    c_prime = complexity_constant(inputs.d, inputs.log_V_Theta, inputs.log_m, inputs.L_f_p)
    return _report(inputs, inputs.d, c_prime, BoundVariant.GLOBAL)


def decompose(d: int, N: int, c_prime: float, conf_delta: float, empirical_risk: float = 0.0) -> BoundReport:
    """
    Three-term decomposition for a known complexity constant.

    Raises:
        ValueError: On d < 1, N < 1, conf_delta outside (0, 1) or a risk outside [0, 1].
    """
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    if not 0.0 < conf_delta < 1.0:
        raise ValueError(f"conf_delta must be in (0, 1), got {conf_delta}")
    if not 0.0 <= empirical_risk <= 1.0:
        raise ValueError(f"empirical_risk must be in [0, 1], got {empirical_risk}")
    return BoundReport(empirical_risk, 2.0 * rademacher_bound(d, N, c_prime), confidence_term(N, conf_delta),
                       c_prime, BoundVariant.GLOBAL, d)


def local_log_volume(d: int, radius_delta: float) -> float:
    """d ln(2 delta), the log volume of a hypercube of half-width delta."""
    if radius_delta <= 0:
        raise ValueError(f"radius must be positive, got {radius_delta}")
    return d * math.log(2.0 * radius_delta)


def local_bound(inputs: BoundInputs, log_V_loc: float, log_m_loc: float, L_loc: float) -> BoundReport:
    """
    Generalization bound with the constant re-estimated on a local region.

    Args:
        inputs (BoundInputs): Global inputs supplying d, N, delta and the empirical risk.
        log_V_loc (float): Log volume of the local region.
        log_m_loc (float): Log of the minimum sqrt det of the Fisher matrix in the region.
        L_loc (float): Gradient bound in the region.

    Returns:
        BoundReport: Three-term decomposition with C_loc in place of C'.
    """
    if L_loc <= 0:
        raise ValueError(f"L_loc must be positive, got {L_loc}")
    c_loc = complexity_constant(inputs.d, log_V_loc, log_m_loc, L_loc)
    return _report(inputs, inputs.d, c_loc, BoundVariant.LOCAL)


def effdim_bound(inputs: BoundInputs, d_eff: float, c_loc: float) -> BoundReport:
    """
    R + 12 sqrt(pi d_eff) exp(C_loc / d_eff) / sqrt(N) + confidence term.

    Args:
        inputs (BoundInputs): Inputs supplying d, N, delta and the empirical risk.
        d_eff (float): Effective dimension in [1, d].
        c_loc (float): Local complexity constant.

    Raises:
        ValueError: If d_eff lies outside [1, d].

    Returns:
        BoundReport: Three-term decomposition.
    """
    if not 1.0 <= d_eff <= inputs.d:
        raise ValueError(f"d_eff must lie in [1, {inputs.d}], got {d_eff}")
    return _report(inputs, d_eff, c_loc, BoundVariant.EFFECTIVE_DIMENSION)


def k_complexity(d: int, c_prime: float) -> float:
    """
    k(d) = sqrt(d) exp(C'/d).

    Raises:
        ValueError: If d < 1.
    """
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    return math.sqrt(d) * _exp(c_prime / d)


def required_samples(d: int, c_prime: float, slack: float = TABLE1_SLACK) -> int:
    """
    Samples needed for the complexity term to be of order one, ceil(k(d)**2 - slack).

    The default slack follows the published scaling table, which rounds k**2 down
    when it exceeds an integer by a few hundredths. slack=0 is the strict ceil(k(d)**2).

    Args:
        d (int): Parameter dimension.
        c_prime (float): Complexity constant.
        slack (float, optional): Amount subtracted before the ceiling. Defaults to 0.05.

    Returns:
        int: Sample count.
    """
    if not 0.0 <= slack < 1.0:
        raise ValueError(f"slack must be in [0, 1), got {slack}")
    k = k_complexity(d, c_prime)
    return max(1, math.ceil(k * k - slack))


@dataclass(frozen=True)
class Table1Row:
    d: int
    k: float
    N: int
    third_term: float


def table1(c_prime: float = 1.0, conf_delta: float = TABLE1_DELTA,
           dimensions: Sequence[int] = TABLE1_DIMENSIONS) -> List[Table1Row]:
    """
    Scaling of k(d) and the required sample count, with the confidence term at that count.

    Args:
        c_prime (float, optional): Complexity constant. Defaults to 1.
        conf_delta (float, optional): Confidence level. Defaults to 0.005.
        dimensions (Sequence[int], optional): Parameter dimensions.

    Returns:
        List[Table1Row]: One row per dimension.
    """
    rows = []
    for d in dimensions:
        n = required_samples(d, c_prime)
        rows.append(Table1Row(d, k_complexity(d, c_prime), n, confidence_term(n, conf_delta)))
    LOGGER.debug("Table of %s rows computed for C' = %s", len(rows), c_prime)
    return rows


def complexity_surface(dimensions: Sequence[int], sample_counts: Sequence[int], c_prime: float) -> np.ndarray:
    """
    Complexity term 12 sqrt(pi d) exp(C'/d) / sqrt(N) over a grid.

    Returns:
        np.ndarray: Array of shape (len(dimensions), len(sample_counts)).
    """
    return np.array([[2.0 * rademacher_bound(d, n, c_prime) for n in sample_counts] for d in dimensions])
