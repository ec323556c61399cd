"""Benchmark configuration: the experimental setup as one JSON document."""

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from defect_bench.constants import UINT64_MASK
from defect_bench.models.dataset import normalize_dataset_name
from defect_bench.models.pipeline import PipelineConfig
from defect_bench.models.specs import ModelKind, ModelSpec

ImputeStrategy = Literal["median", "drop_rows"]


class DatasetEntry(BaseModel):
    """One dataset column of the benchmark grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    path: str
    use_pca: bool | None = Field(None, description="None = on for the study's PCA datasets")
    impute: ImputeStrategy = "median"
    label_column: str | None = Field(None, description="CSV only; ARFF detects the class attribute")

    @field_validator("name")
    @classmethod
    def _normalize_name(cls, v: str) -> str:
        return normalize_dataset_name(v)


class BenchmarkConfig(BaseModel):
    """Datasets x models grid plus the shared CV and pipeline settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    datasets: list[DatasetEntry] = Field(..., min_length=1)
    models: list[ModelSpec] = Field(..., min_length=1)
    k: int = Field(10, ge=2)
    master_seed: int = Field(42, ge=0, le=UINT64_MASK)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    output_dir: str = "output"
    jobs: int | None = Field(None, gt=0)

    @field_validator("models", mode="before")
    @classmethod
    def _expand_model_shorthand(cls, v: Any) -> Any:
        # "svm" is shorthand for {"kind": "svm"} with ledger defaults
        if isinstance(v, list):
            return [{"kind": item} if isinstance(item, str) else item for item in v]
        return v

    @model_validator(mode="after")
    def _check_unique(self) -> "BenchmarkConfig":
        names = [entry.name for entry in self.datasets]
        if len(set(names)) != len(names):
            raise ValueError(f"dataset names must be unique: {names}")
        paths = [str(Path(entry.path)) for entry in self.datasets]
        if len(set(paths)) != len(paths):
            raise ValueError("dataset paths must be distinct")
        kinds = [spec.kind for spec in self.models]
        if len(set(kinds)) != len(kinds):
            raise ValueError("each model kind may appear once")
        return self

    def pipeline_for(self, entry: DatasetEntry, pca_datasets: list[str]) -> PipelineConfig:
        """Shared pipeline settings with the dataset's PCA switch applied."""
        use_pca = entry.use_pca if entry.use_pca is not None else entry.name in pca_datasets
        return self.pipeline.model_copy(update={"use_pca": use_pca})

    def resolved(self, pca_datasets: list[str]) -> "BenchmarkConfig":
        """Every default made explicit: PCA switches and model seeds filled in."""
        datasets = [
            entry.model_copy(
                update={"use_pca": entry.use_pca if entry.use_pca is not None else entry.name in pca_datasets}
            )
            for entry in self.datasets
        ]
        models = [spec.with_seed(self.master_seed) for spec in self.models]
        return self.model_copy(update={"datasets": datasets, "models": models})

    @classmethod
    def study_default(cls, data_dir: str, names: list[str], **overrides: Any) -> "BenchmarkConfig":
        """All six model kinds over `data_dir/<NAME>.arff` for each name."""
        datasets = [DatasetEntry(name=name, path=str(Path(data_dir) / f"{name}.arff")) for name in names]
        return cls(datasets=datasets, models=[{"kind": kind} for kind in ModelKind], **overrides)
