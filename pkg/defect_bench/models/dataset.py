"""Dataset models: the parsed feature matrix and its profile."""

import re

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from defect_bench.models.arrays import FloatArray, IntArray


def normalize_dataset_name(name: str) -> str:
    """Uppercase, with runs of spaces, dashes and dots collapsed to `_`."""
    return re.sub(r"[\s\-.]+", "_", name.strip()).upper()


class Dataset(BaseModel):
    """A rectangular feature matrix with binary defect labels.

    Missing entries are NaN until `impute_missing` removes them.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Normalized identifier, e.g. KC1_CL")
    features: FloatArray = Field(..., description="n_instances x n_features")
    labels: IntArray = Field(..., description="1 = defective, 0 = clean")
    feature_names: list[str]
    source_path: str = ""

    @field_validator("name")
    @classmethod
    def _normalize_name(cls, v: str) -> str:
        return normalize_dataset_name(v)

    @model_validator(mode="after")
    def _check_shapes(self) -> "Dataset":
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got {self.features.ndim}-D")
        n, p = self.features.shape
        if self.labels.shape != (n,):
            raise ValueError(f"labels length {self.labels.shape[0]} != {n} rows")
        if len(self.feature_names) != p:
            raise ValueError(f"{len(self.feature_names)} feature names for {p} columns")
        if len(set(self.feature_names)) != p:
            raise ValueError("feature_names must be unique")
        if n and not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if np.isinf(self.features).any():
            raise ValueError("features must not contain infinities")
        return self

    @property
    def n_instances(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_faulty(self) -> int:
        return int(self.labels.sum())

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.features)

    @property
    def missing_count(self) -> int:
        return int(self.missing_mask.sum())

    @property
    def has_both_classes(self) -> bool:
        return 0 < self.n_faulty < self.n_instances

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Rows `indices`, in that order."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            name=self.name,
            features=self.features[idx],
            labels=self.labels[idx],
            feature_names=self.feature_names,
            source_path=self.source_path,
        )

    def with_features(self, features: np.ndarray) -> "Dataset":
        """Same labels and metadata over a replacement matrix of the same shape."""
        return Dataset(
            name=self.name,
            features=features,
            labels=self.labels,
            feature_names=self.feature_names,
            source_path=self.source_path,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.feature_names == other.feature_names
            and self.source_path == other.source_path
            and self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features, equal_nan=True)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None  # type: ignore[assignment]


class FeatureStats(BaseModel):
    """Summary of one feature column over its non-missing entries."""

    name: str
    min: float | None
    max: float | None
    mean: float | None
    std: float | None = Field(None, description="Sample standard deviation (n - 1)")
    missing_count: int = Field(..., ge=0)


class DatasetProfile(BaseModel):
    """Counts and per-feature statistics of a parsed dataset."""

    name: str
    n_instances: int = Field(..., ge=0)
    n_features: int = Field(..., ge=0)
    n_faulty: int = Field(..., ge=0)
    faulty_fraction: float = Field(..., ge=0.0, le=1.0)
    missing_count: int = Field(..., ge=0)
    per_feature_stats: list[FeatureStats]

    @property
    def faulty_percent(self) -> float:
        return 100.0 * self.faulty_fraction


class PublishedProfileCheck(BaseModel):
    """Comparison of a profile with the study's dataset table."""

    name: str
    instances_expected: int
    instances_actual: int
    attributes_expected: int
    attributes_actual: int = Field(..., description="Declared attributes including the class")
    faulty_percent_expected: float
    faulty_percent_actual: float
    instances_ok: bool
    attributes_ok: bool
    faulty_ok: bool

    @property
    def ok(self) -> bool:
        return self.instances_ok and self.attributes_ok and self.faulty_ok
