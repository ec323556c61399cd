"""Output models for evaluation and benchmark runs."""

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

from defect_bench.constants import FORMAT_VERSION


# ============================================================================
# METRICS
# ============================================================================

class Confusion(BaseModel):
    """Binary confusion counts; class 1 (defective) is positive."""

    tp: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


class MetricsReport(BaseModel):
    """Pooled confusion metrics plus per-fold accuracies."""

    confusion: Confusion
    accuracy: float = Field(..., ge=0.0, le=1.0)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)
    precision_undefined: bool = Field(False, description="No positive predictions; precision reported as 0")
    recall_undefined: bool = Field(False, description="No positive labels; recall reported as 0")
    per_fold_accuracy: list[float]
    mean_accuracy: float
    std_accuracy: float = Field(..., description="Population std over folds")

    @model_validator(mode="after")
    def _check_confusion(self) -> "MetricsReport":
        if self.confusion.total == 0:
            raise ValueError("metrics need at least one evaluated instance")
        return self


# ============================================================================
# BENCHMARK
# ============================================================================

class FoldRecord(BaseModel):
    """One fold of one (dataset, model) cell; a line of folds.jsonl."""

    dataset: str
    model: str
    fold: int = Field(..., ge=0)
    seed: int
    confusion: Confusion
    accuracy: float
    train_time_ms: int = Field(0, ge=0, description="Wall clock; excluded from determinism checks")
    n_train: int
    n_test: int
    n_model_features: int
    pipeline_checksum: str
    model_checksum: str


CellStatus = Literal["ok", "na", "error"]


class CellResult(BaseModel):
    """One (model, dataset) cell of the benchmark grid."""

    model: str
    dataset: str
    status: CellStatus
    metrics: MetricsReport | None = None
    error: str | None = None


class TableMetadata(BaseModel):
    """Provenance of a benchmark table; excluded from determinism checks."""

    master_seed: int
    k: int
    config: dict[str, Any]
    fixture_checksums: dict[str, str | None]
    timestamp: str
    version: str
    notes: list[str] = Field(default_factory=list)


class BenchmarkTable(BaseModel):
    """Model x dataset grid of cross-validated metrics."""

    format_version: int = FORMAT_VERSION
    models: list[str]
    datasets: list[str]
    cells: list[CellResult]
    baselines: dict[str, float | None] = Field(
        default_factory=dict,
        description="All-negative predictor accuracy per dataset",
    )
    metadata: TableMetadata

    def cell(self, model: str, dataset: str) -> CellResult:
        for cell in self.cells:
            if cell.model == model and cell.dataset == dataset:
                return cell
        raise KeyError(f"no cell for ({model}, {dataset})")

    @property
    def has_errors(self) -> bool:
        return any(cell.status == "error" for cell in self.cells)
