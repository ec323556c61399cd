"""Missing-value handling."""

import numpy as np

from defect_bench.errors import ImputationError
from defect_bench.models.benchmark import ImputeStrategy
from defect_bench.models.dataset import Dataset
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


def column_medians(d: Dataset) -> np.ndarray:
    """Per-feature median over non-missing entries."""
    all_missing = d.missing_mask.all(axis=0)
    if all_missing.any():
        names = [n for n, bad in zip(d.feature_names, all_missing) if bad]
        raise ImputationError(f"{d.name}: features entirely missing, no median: {names}")
    return np.nanmedian(d.features, axis=0)


def fill_missing(x: np.ndarray, fill_values: np.ndarray) -> np.ndarray:
    """Copy of `x` with NaN entries replaced column-wise by `fill_values`."""
    return np.where(np.isnan(x), fill_values, x)


def impute_missing(d: Dataset, strategy: ImputeStrategy = "median") -> Dataset:
    """Dataset with no missing entries. A dataset without any is returned as is."""
    missing = d.missing_mask
    if not missing.any():
        return d

    if strategy == "median":
        filled = fill_missing(d.features, column_medians(d))
        logger.info(
            "Missing values imputed with column medians",
            extra={"dataset": d.name, "cells": int(missing.sum())},
        )
        return d.with_features(filled)

    if strategy == "drop_rows":
        keep = ~missing.any(axis=1)
        kept = d.subset(np.flatnonzero(keep))
        if kept.n_instances == 0:
            raise ImputationError(f"{d.name}: dropping rows with missing values leaves no rows")
        if not kept.has_both_classes:
            raise ImputationError(f"{d.name}: dropping rows with missing values leaves a single class")
        logger.info(
            "Rows with missing values dropped",
            extra={"dataset": d.name, "rows_dropped": int((~keep).sum())},
        )
        return kept

    raise ImputationError(f"unknown imputation strategy {strategy!r}")
