"""Principal component analysis on top of the Jacobi eigensolver."""

import numpy as np

from defect_bench.errors import NumericsError
from defect_bench.models.pipeline import PcaBasis
from defect_bench.numerics.linalg import as_matrix, covariance, eigh_symmetric
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)

# Slack on the cumulative ratio so that a target of 1.0 is reachable in floating point
_RATIO_SLACK = 1e-12


def fit_pca(x_standardized, variance_target: float) -> PcaBasis:
    """Fewest leading components whose cumulative explained ratio reaches the target."""
    if not 0.0 < variance_target <= 1.0:
        raise NumericsError(f"variance target must be in (0, 1], got {variance_target}")
    x = as_matrix(x_standardized, "x")
    if x.shape[0] < 2:
        raise NumericsError(f"PCA needs at least 2 rows, got {x.shape[0]}")

    eigenvalues, eigenvectors = eigh_symmetric(covariance(x))
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    total = float(eigenvalues.sum())
    if total > 0:
        cumulative = np.minimum(np.cumsum(eigenvalues) / total, 1.0)
    else:
        cumulative = np.ones_like(eigenvalues)
    n_components = int(np.searchsorted(cumulative, variance_target - _RATIO_SLACK) + 1)
    n_components = min(n_components, eigenvalues.size)

    logger.debug(
        "PCA fitted",
        extra={
            "input_features": x.shape[1],
            "components": n_components,
            "explained": float(cumulative[n_components - 1]),
        },
    )
    return PcaBasis(
        center=x.mean(axis=0),
        components=eigenvectors[:, :n_components],
        explained_variance=eigenvalues,
        cumulative_explained_ratio=cumulative,
        n_components=n_components,
    )


def project(basis: PcaBasis, x) -> np.ndarray:
    """Scores of `x` on the basis components."""
    return (as_matrix(x, "x") - basis.center) @ basis.components


def reconstruct(basis: PcaBasis, scores) -> np.ndarray:
    """Map scores back to the input space (exact when all components are kept)."""
    return as_matrix(scores, "scores") @ basis.components.T + basis.center
