"""Fit-on-train preprocessing: standardize, then correlation filter, then optional PCA.

Standardizing first makes both the Pearson filter and PCA scale-free. All
fitted state comes from the rows passed to `fit_pipeline`; `apply_pipeline`
only replays it.
"""

import numpy as np

from defect_bench.errors import PreprocessError
from defect_bench.models.dataset import Dataset
from defect_bench.models.pipeline import FittedPipeline, PipelineConfig
from defect_bench.numerics.linalg import as_matrix
from defect_bench.preprocess.correlation import constant_columns, correlation_filter
from defect_bench.preprocess.pca import fit_pca, project
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


def _standardize(x: np.ndarray, means: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return (x - means) / scale


def fit_pipeline(train: Dataset, config: PipelineConfig) -> FittedPipeline:
    """Fit standardization, the keep-mask and the optional PCA basis on `train`."""
    if train.missing_count:
        raise PreprocessError(f"{train.name}: impute missing values before fitting")
    x = as_matrix(train.features, "train features")
    if x.shape[0] < 2:
        raise PreprocessError(f"{train.name}: pipeline fit needs at least 2 rows")

    constant = constant_columns(x)
    means = x.mean(axis=0)
    stds = np.where(constant, 0.0, x.std(axis=0, ddof=1))
    scale = np.where(stds > 0, stds, 1.0)

    z = _standardize(x, means, scale) if config.standardize else x
    keep = correlation_filter(z, config.correlation_threshold)

    pca = None
    if config.use_pca:
        pca = fit_pca(z[:, keep], config.pca_variance_target)

    fitted = FittedPipeline(
        config=config,
        feature_names=train.feature_names,
        means=means,
        stds=stds,
        constant_mask=constant,
        keep_mask=keep,
        pca=pca,
    )
    logger.debug(
        "Pipeline fitted",
        extra={
            "dataset": train.name,
            "rows": x.shape[0],
            "kept": int(keep.sum()),
            "output_features": fitted.n_output_features,
        },
    )
    return fitted


def apply_pipeline(p: FittedPipeline, x) -> np.ndarray:
    """Standardize with stored stats, mask columns, then project if PCA is on."""
    x = as_matrix(x, "x")
    if x.shape[1] != p.n_input_features:
        raise PreprocessError(f"expected {p.n_input_features} columns, got {x.shape[1]}")
    z = _standardize(x, p.means, p.scale) if p.config.standardize else x
    z = z[:, p.keep_mask]
    if p.pca is not None:
        z = project(p.pca, z)
    return z
