"""Dense matrix helpers: covariance and a cyclic Jacobi eigensolver."""

import math

import numpy as np

from defect_bench.errors import NumericsError
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-9


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """float64 2-D view of `x`; every entry must be finite."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise NumericsError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NumericsError(f"{name} contains non-finite entries")
    return arr


def covariance(x) -> np.ndarray:
    """Sample covariance (n - 1 denominator) of the columns of `x`."""
    x = as_matrix(x, "x")
    n = x.shape[0]
    if n < 2:
        raise NumericsError(f"covariance needs at least 2 rows, got {n}")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return (cov + cov.T) / 2.0


def _off_diagonal_norm(a: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part, summed directly from the upper triangle."""
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def eigh_symmetric(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps every (p, q) pair until the off-diagonal Frobenius norm is at most
    1e-12 * ||a||_F, or 100 sweeps. Returns eigenvalues in descending order
    (ties kept in original diagonal order) and the matching orthonormal
    eigenvectors as columns, each signed so that its largest-magnitude entry
    is positive.
    """
    a = as_matrix(a, "a")
    n, m = a.shape
    if n != m:
        raise NumericsError(f"eigh_symmetric needs a square matrix, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise NumericsError("eigh_symmetric needs a symmetric matrix")

    a = (a + a.T) / 2.0
    v = np.eye(n)
    target = JACOBI_TOL * float(np.linalg.norm(a))

    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS and _off_diagonal_norm(a) > target:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q]
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    if sweeps == JACOBI_MAX_SWEEPS:
        logger.warning("Jacobi sweep limit reached", extra={"n": n, "off_norm": _off_diagonal_norm(a)})

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    v = v[:, order]

    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[pivots, np.arange(n)] < 0, -1.0, 1.0)
    return eigenvalues, v * signs
