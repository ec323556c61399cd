"""Pearson correlation and the greedy correlated-feature filter."""

import numpy as np

from defect_bench.errors import NumericsError, PreprocessError
from defect_bench.numerics.linalg import as_matrix, covariance
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


def constant_columns(x) -> np.ndarray:
    """Mask of columns whose values are all identical."""
    x = as_matrix(x, "x")
    return np.ptp(x, axis=0) == 0


def pearson_correlation(x) -> np.ndarray:
    """p x p Pearson r matrix.

    The diagonal is exactly 1 and entries are clipped to [-1, 1]. Constant
    columns have r = 0 with every other column.
    """
    x = as_matrix(x, "x")
    if x.shape[0] < 2:
        raise NumericsError(f"correlation needs at least 2 rows, got {x.shape[0]}")
    cov = covariance(x)
    constant = constant_columns(x)
    std = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    safe = np.where(constant | (std == 0), 1.0, std)
    r = cov / np.outer(safe, safe)
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    r = np.clip(r, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r


def correlation_filter(x, threshold: float) -> np.ndarray:
    """Keep-mask after a greedy scan in feature order.

    For every pair i < j that are both still kept and have |r| >= threshold,
    j is dropped. Constant features are always dropped.
    """
    if not 0.0 < threshold <= 1.0:
        raise PreprocessError(f"correlation threshold must be in (0, 1], got {threshold}")
    x = as_matrix(x, "x")
    r = np.abs(pearson_correlation(x))
    constant = constant_columns(x)
    keep = ~constant
    if constant.any():
        logger.warning(
            "Constant features dropped",
            extra={"columns": np.flatnonzero(constant).tolist()},
        )

    p = x.shape[1]
    for i in range(p):
        if not keep[i]:
            continue
        correlated = keep[i + 1:] & (r[i, i + 1:] >= threshold)
        if correlated.any():
            dropped = np.flatnonzero(correlated) + i + 1
            keep[dropped] = False
            logger.debug(
                "Correlated features dropped",
                extra={"kept": i, "dropped": dropped.tolist(), "threshold": threshold},
            )

    if not keep.any():
        raise PreprocessError("correlation filter dropped every feature")
    return keep
