"""Dataset profiling and comparison with the study's dataset table."""

import numpy as np

from defect_bench.constants import PUBLISHED_PROFILES
from defect_bench.models.dataset import Dataset, DatasetProfile, FeatureStats, PublishedProfileCheck

FAULTY_PERCENT_TOLERANCE = 0.5


def _feature_stats(name: str, column: np.ndarray) -> FeatureStats:
    present = column[~np.isnan(column)]
    missing = int(column.size - present.size)
    if present.size == 0:
        return FeatureStats(name=name, min=None, max=None, mean=None, std=None, missing_count=missing)
    std = float(np.std(present, ddof=1)) if present.size > 1 else 0.0
    return FeatureStats(
        name=name,
        min=float(present.min()),
        max=float(present.max()),
        mean=float(present.mean()),
        std=std,
        missing_count=missing,
    )


def profile(d: Dataset) -> DatasetProfile:
    """Counts, faulty fraction and per-feature stats over non-missing entries."""
    n = d.n_instances
    return DatasetProfile(
        name=d.name,
        n_instances=n,
        n_features=d.n_features,
        n_faulty=d.n_faulty,
        faulty_fraction=d.n_faulty / n if n else 0.0,
        missing_count=d.missing_count,
        per_feature_stats=[_feature_stats(name, d.features[:, j]) for j, name in enumerate(d.feature_names)],
    )


def profile_matches_published(p: DatasetProfile) -> PublishedProfileCheck | None:
    """Check against the study's row for this dataset, or None if it has none.

    Whether the study's attribute count includes the class is not stated, so
    the declared count (features + class) may differ from it by one.
    """
    row = PUBLISHED_PROFILES.get(p.name)
    if row is None:
        return None
    attributes, instances, faulty_percent = row
    declared = p.n_features + 1
    return PublishedProfileCheck(
        name=p.name,
        instances_expected=instances,
        instances_actual=p.n_instances,
        attributes_expected=attributes,
        attributes_actual=declared,
        faulty_percent_expected=faulty_percent,
        faulty_percent_actual=p.faulty_percent,
        instances_ok=p.n_instances == instances,
        attributes_ok=abs(declared - attributes) <= 1,
        faulty_ok=abs(p.faulty_percent - faulty_percent) <= FAULTY_PERCENT_TOLERANCE,
    )
