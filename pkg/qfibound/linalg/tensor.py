"""
Dense complex linear algebra on small matrices and stacks of matrices
"""

import numpy as np

from qfibound import HERMITIAN_TOL, PSD_TOL
from qfibound.linalg import LOGGER

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """
    Checks max |A[i][j] - conj(A[j][i])| <= tol for every matrix in the stack.

    Args:
        a (np.ndarray): Matrix or stack of matrices.
        tol (float, optional): Absolute tolerance. Defaults to HERMITIAN_TOL.

    Returns:
        bool: True if every matrix is Hermitian within tolerance.
    """
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        return False
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Kronecker product with the standard block layout, broadcast over leading axes.

    Args:
        a (np.ndarray): Left factor, shape (..., m, n).
        b (np.ndarray): Right factor, shape (..., p, q).

    Returns:
        np.ndarray: Product of shape (..., m*p, n*q).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim == 2 and b.ndim == 2:
        return np.kron(a, b)
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    rows = a.shape[-2] * b.shape[-2]
    cols = a.shape[-1] * b.shape[-1]
    return out.reshape(out.shape[:-4] + (rows, cols))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int):
    """Zeroes the (p, q) entry of every matrix in the stack with one complex Jacobi rotation."""
    b = a[:, p, q]
    absb = np.abs(b)
    active = absb > 0.0
    safe = np.where(active, absb, 1.0)
    phase = np.where(active, b / safe, 1.0)
    tau = np.where(active, (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe), 0.0)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    t = np.where(active, sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    c_col = c[:, None]
    s_col = s[:, None]
    phase_col = phase[:, None]

    col_p = a[:, :, p].copy()
    col_q = a[:, :, q] * np.conj(phase_col)
    a[:, :, p] = c_col * col_p - s_col * col_q
    a[:, :, q] = s_col * col_p + c_col * col_q

    row_p = a[:, p, :].copy()
    row_q = a[:, q, :] * phase_col
    a[:, p, :] = c_col * row_p - s_col * row_q
    a[:, q, :] = s_col * row_p + c_col * row_q

    a[:, p, q] = 0.0
    a[:, q, p] = 0.0

    vec_p = v[:, :, p].copy()
    vec_q = v[:, :, q] * np.conj(phase_col)
    v[:, :, p] = c_col * vec_p - s_col * vec_q
    v[:, :, q] = s_col * vec_p + c_col * vec_q


def hermitian_eig(a: np.ndarray, tol: float = HERMITIAN_TOL):
    """
    Eigendecomposition of a Hermitian matrix (or stack) by cyclic Jacobi rotations.

    Eigenvalues come back in ascending order, eigenvectors as the columns of a unitary.
    Inside a degenerate eigenspace the basis is arbitrary.

    Args:
        a (np.ndarray): Hermitian matrix of shape (n, n) or stack (..., n, n).
        tol (float, optional): Hermiticity tolerance. Defaults to HERMITIAN_TOL.

    Raises:
        ValueError: If the input is not Hermitian within tolerance.

    Returns:
        tuple: (eigenvalues, eigenvectors) with shapes (..., n) and (..., n, n).
    """
    a = np.asarray(a)
    if np.iscomplexobj(a):
        a = a.astype(np.complex128)
    else:
        a = a.astype(np.float64)
    if not is_hermitian(a, tol):
        deviation = np.max(np.abs(a - dagger(a))) if a.ndim >= 2 and a.shape[-1] == a.shape[-2] else np.nan
        LOGGER.error("Eigendecomposition of a non-Hermitian matrix requested (deviation %s)", deviation)
        raise ValueError(f"matrix is not Hermitian within {tol} (max deviation {deviation})")

    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    work = (0.5 * (a + dagger(a))).reshape((-1, n, n)).copy()
    vectors = np.broadcast_to(np.eye(n, dtype=work.dtype), work.shape).copy()

    scale = np.sqrt(np.sum(np.abs(work) ** 2, axis=(-2, -1)))
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(work[:, off_mask]) ** 2, axis=-1))
        if np.all(off <= JACOBI_TOL * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(work, vectors, p, q)
    else:
        LOGGER.warning("Jacobi iteration stopped after %s sweeps without full convergence", JACOBI_MAX_SWEEPS)

    values = np.real(np.diagonal(work, axis1=-2, axis2=-1)).copy()
    order = np.argsort(values, axis=-1, kind="stable")
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[:, None, :], axis=-1)
    return values.reshape(batch_shape + (n,)), vectors.reshape(batch_shape + (n, n))


def pseudo_inverse(a: np.ndarray, cutoff: float) -> np.ndarray:
    """
    Moore-Penrose inverse of a positive semidefinite Hermitian matrix.

    Eigenvalues at or above the cutoff are inverted, everything below maps to zero.

    Args:
        a (np.ndarray): Hermitian PSD matrix.
        cutoff (float): Smallest eigenvalue that is inverted.

    Raises:
        ValueError: If the cutoff is negative or an eigenvalue is below -PSD_TOL.

    Returns:
        np.ndarray: The pseudo-inverse, real when the input is real.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    values, vectors = hermitian_eig(a)
    if values.min() < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {values.min()})")
    keep = (values >= cutoff) & (values > 0.0)
    inverted = np.zeros_like(values)
    inverted[keep] = 1.0 / values[keep]
    result = (vectors * inverted) @ dagger(vectors)
    if not np.iscomplexobj(a):
        result = result.real
    return result


def psd_log_sqrt_det(a: np.ndarray, floor: float) -> float:
    """
    Returns 0.5 * sum(ln(max(eigenvalue, floor))).

    Args:
        a (np.ndarray): Hermitian PSD matrix.
        floor (float): Positive floor applied to every eigenvalue.

    Returns:
        float: The floored log square-root determinant.
    """
    if floor <= 0:
        raise ValueError(f"floor must be positive, got {floor}")
    values, _ = hermitian_eig(a)
    return log_sqrt_det_from_spectrum(values, floor)


def log_sqrt_det_from_spectrum(values: np.ndarray, floor: float) -> float:
    """Same as psd_log_sqrt_det for an already computed spectrum."""
    return float(0.5 * np.sum(np.log(np.maximum(np.asarray(values, dtype=float), floor))))
