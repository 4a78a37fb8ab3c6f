"""
Dudley entropy integral, numerically and through the incomplete gamma function
"""

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma, gammaincc

from qfibound.bounds import LOGGER

QUAD_EPSABS = 1e-9
QUAD_LIMIT = 200


def dudley_integral(d: int, c_prime: float) -> float:
    """
    Integral over (0, 1] of sqrt(C' - d ln eps) d eps.

    Evaluated after the substitution t = -ln eps, which turns it into the integral
    over [0, inf) of sqrt(C' + d t) exp(-t) dt.

    Args:
        d (int): Parameter dimension.
        c_prime (float): Nonnegative complexity constant.

    Raises:
        ValueError: If C' is negative.

    Returns:
        float: The integral.
    """
    if c_prime < 0:
        raise ValueError(f"C' must be nonnegative, got {c_prime}")
    value, error = quad(lambda t: math.sqrt(c_prime + d * t) * math.exp(-t), 0.0, np.inf,
                        epsabs=QUAD_EPSABS, limit=QUAD_LIMIT)
    LOGGER.debug("Dudley integral d=%s C'=%s: %s (error estimate %s)", d, c_prime, value, error)
    return float(value)


def dudley_numeric(d: int, c_prime: float, N: int) -> float:
    """12 / sqrt(N) times the Dudley integral."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    return 12.0 / math.sqrt(N) * dudley_integral(d, c_prime)


def dudley_closed_form(d: int, c_prime: float, N: int) -> float:
    """
    12 / sqrt(N) * sqrt(d) exp(C'/d) Gamma(3/2, C'/d) with the upper incomplete gamma.

    Raises:
        ValueError: If C' is negative or N < 1.
    """
    if c_prime < 0:
        raise ValueError(f"C' must be nonnegative, got {c_prime}")
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    a = c_prime / d
    upper = float(gammaincc(1.5, a) * gamma(1.5))
    return 12.0 / math.sqrt(N) * math.sqrt(d) * math.exp(a) * upper
