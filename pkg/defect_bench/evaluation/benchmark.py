"""Benchmark runner: cross-validate every model kind on every dataset.

A dataset whose file does not exist produces N/A cells; a cell whose
training or evaluation raises produces an ERR cell. Neither stops the run.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from defect_bench import __version__
from defect_bench.classifiers.base import TrainedModel
from defect_bench.classifiers.registry import load_model
from defect_bench.constants import FORMAT_VERSION, SEED_OFFSET_MODEL, get_pca_datasets
from defect_bench.errors import DefectBenchError, ModelError
from defect_bench.evaluation.cross_validation import fit_fold, prepare_folds, run_fold
from defect_bench.evaluation.folds import FoldAssignment
from defect_bench.evaluation.metrics import aggregate_folds, majority_baseline
from defect_bench.ingest.impute import fill_missing, impute_missing
from defect_bench.ingest.loader import file_checksum, load_dataset
from defect_bench.models.arrays import FloatArray
from defect_bench.models.benchmark import BenchmarkConfig, DatasetEntry
from defect_bench.models.dataset import Dataset
from defect_bench.models.outputs import BenchmarkTable, CellResult, FoldRecord, TableMetadata
from defect_bench.models.pipeline import FittedPipeline, PipelineConfig
from defect_bench.models.specs import ModelSpec
from defect_bench.numerics.random import derive_seed
from defect_bench.preprocess.pipeline import apply_pipeline
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


def report_notes(k: int) -> list[str]:
    return [
        f"Cells are mean {k}-fold stratified CV accuracy in percent; the published table does not name its metric.",
        "Preprocessing (imputation, standardization, correlation filter, PCA) is refit inside every fold, "
        "so published numbers from a single global fit need not be matched exactly.",
    ]


@dataclass
class BenchmarkRun:
    table: BenchmarkTable
    folds: list[FoldRecord] = field(default_factory=list)


def load_entry(entry: DatasetEntry) -> Dataset | None:
    """The entry's dataset, or None when its file is absent."""
    path = Path(entry.path)
    if not path.is_file():
        logger.warning("Dataset file not found; column will be N/A", extra={"dataset": entry.name, "path": str(path)})
        return None
    d = load_dataset(path, name=entry.name, label_column=entry.label_column)
    if entry.impute == "drop_rows":
        d = impute_missing(d, "drop_rows")
    logger.info(
        "Dataset loaded",
        extra={
            "dataset": d.name,
            "instances": d.n_instances,
            "features": d.n_features,
            "missing": d.missing_count,
        },
    )
    return d


@dataclass(frozen=True)
class CellPlan:
    """Everything the folds of one grid cell need, ready to ship to a worker."""

    spec: ModelSpec
    data: Dataset
    assignment: FoldAssignment
    pipeline_config: PipelineConfig


def run_cell_fold(plan: CellPlan, fold: int, master_seed: int) -> FoldRecord | str:
    """One fold's record, or the error text when it raised."""
    try:
        return run_fold(plan.spec, plan.data, plan.pipeline_config, plan.assignment, fold, master_seed).record
    except Exception as e:
        return f"{type(e).__name__}: {e}"


def cell_result(spec: ModelSpec, dataset: str, outcomes: list[FoldRecord | str]) -> tuple[CellResult, list[FoldRecord]]:
    errors = [o for o in outcomes if isinstance(o, str)]
    if errors:
        logger.error(
            "Benchmark cell failed",
            extra={"dataset": dataset, "model": str(spec.kind), "error": errors[0], "failed_folds": len(errors)},
        )
        return CellResult(model=str(spec.kind), dataset=dataset, status="error", error=errors[0]), []
    records = sorted(outcomes, key=lambda r: r.fold)
    return CellResult(model=str(spec.kind), dataset=dataset, status="ok", metrics=aggregate_folds(records)), records


def run_benchmark(
    config: BenchmarkConfig,
    pca_datasets: list[str] | None = None,
    jobs: int = 1,
) -> BenchmarkRun:
    """Fill the model x dataset grid; fold records come back grid-ordered."""
    pca_datasets = get_pca_datasets() if pca_datasets is None else pca_datasets
    config = config.resolved(pca_datasets)

    datasets: dict[str, Dataset | None] = {}
    load_errors: dict[str, str] = {}
    for entry in config.datasets:
        try:
            datasets[entry.name] = load_entry(entry)
        except DefectBenchError as e:
            logger.error("Dataset failed to load", extra={"dataset": entry.name, "error": str(e)})
            datasets[entry.name] = None
            load_errors[entry.name] = f"{type(e).__name__}: {e}"

    tasks = [
        (spec, entry)
        for spec in config.models
        for entry in config.datasets
        if datasets[entry.name] is not None
    ]
    plans: dict[tuple[str, str], CellPlan] = {}
    by_key: dict[tuple[str, str], tuple[CellResult, list[FoldRecord]]] = {}
    for spec, entry in tasks:
        key = (str(spec.kind), entry.name)
        try:
            d, assignment = prepare_folds(datasets[entry.name], config.k, config.master_seed, entry.impute)
        except DefectBenchError as e:
            by_key[key] = cell_result(spec, entry.name, [f"{type(e).__name__}: {e}"])
            continue
        plans[key] = CellPlan(spec, d, assignment, config.pipeline_for(entry, pca_datasets))

    # every fold of every cell is one unit of parallel work
    units = [(key, fold) for key in plans for fold in range(config.k)]
    if jobs == 1 or len(units) <= 1:
        outcomes = [run_cell_fold(plans[key], fold, config.master_seed) for key, fold in units]
    else:
        outcomes = Parallel(n_jobs=jobs)(
            delayed(run_cell_fold)(plans[key], fold, config.master_seed) for key, fold in units
        )
    per_cell: dict[tuple[str, str], list[FoldRecord | str]] = {key: [] for key in plans}
    for (key, _), outcome in zip(units, outcomes):
        per_cell[key].append(outcome)
    for key, plan in plans.items():
        by_key[key] = cell_result(plan.spec, key[1], per_cell[key])

    cells: list[CellResult] = []
    folds: list[FoldRecord] = []
    for spec in config.models:
        for entry in config.datasets:
            key = (str(spec.kind), entry.name)
            if key in by_key:
                cell, records = by_key[key]
                cells.append(cell)
                folds.extend(records)
            elif entry.name in load_errors:
                cells.append(CellResult(model=key[0], dataset=entry.name, status="error", error=load_errors[entry.name]))
            else:
                cells.append(CellResult(model=key[0], dataset=entry.name, status="na"))

    baselines = {
        entry.name: (majority_baseline(d.labels) if (d := datasets[entry.name]) is not None else None)
        for entry in config.datasets
    }
    checksums = {
        entry.name: (file_checksum(entry.path) if Path(entry.path).is_file() else None) for entry in config.datasets
    }
    table = BenchmarkTable(
        models=[str(spec.kind) for spec in config.models],
        datasets=[entry.name for entry in config.datasets],
        cells=cells,
        baselines=baselines,
        metadata=TableMetadata(
            master_seed=config.master_seed,
            k=config.k,
            config=config.model_dump(mode="json"),
            fixture_checksums=checksums,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            version=__version__,
            notes=report_notes(config.k),
        ),
    )
    return BenchmarkRun(table=table, folds=folds)


# ============================================================================
# SAVED MODELS
# ============================================================================

class ModelBundle(BaseModel):
    """Everything needed to score raw feature rows of one dataset."""

    model_config = ConfigDict(frozen=True)

    format_version: int = FORMAT_VERSION
    dataset: str
    feature_names: list[str]
    fill_values: FloatArray | None = Field(None, description="Medians used for missing entries")
    pipeline: FittedPipeline
    model: dict[str, Any]

    def trained_model(self) -> TrainedModel:
        return load_model(json.dumps(self.model))

    def predict_proba(self, x):
        if self.fill_values is not None:
            x = fill_missing(x, self.fill_values)
        return self.trained_model().predict_proba(apply_pipeline(self.pipeline, x))

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "ModelBundle":
        try:
            bundle = cls.model_validate_json(text)
        except ValidationError as e:
            raise ModelError(f"invalid model bundle: {e}") from e
        if bundle.format_version != FORMAT_VERSION:
            raise ModelError(f"unsupported bundle format_version {bundle.format_version}")
        return bundle

    __hash__ = None  # type: ignore[assignment]


def fit_bundle(spec: ModelSpec, d: Dataset, entry: DatasetEntry, config: BenchmarkConfig, pca_datasets: list[str]) -> ModelBundle:
    """Pipeline and model fitted on the whole dataset."""
    full_spec = spec.with_seed(derive_seed(config.master_seed, SEED_OFFSET_MODEL))
    pipeline, model, medians = fit_fold(full_spec, d, config.pipeline_for(entry, pca_datasets))
    return ModelBundle(
        dataset=d.name,
        feature_names=d.feature_names,
        fill_values=medians,
        pipeline=pipeline,
        model=model.model_dump(mode="json"),
    )


def save_bundles(
    config: BenchmarkConfig,
    table: BenchmarkTable,
    out_dir: str | Path,
    pca_datasets: list[str] | None = None,
) -> list[Path]:
    """Write `<DATASET>__<model>.json` for every ok cell of `table`."""
    pca_datasets = get_pca_datasets() if pca_datasets is None else pca_datasets
    config = config.resolved(pca_datasets)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in config.datasets:
        cells = [c for c in table.cells if c.dataset == entry.name and c.status == "ok"]
        if not cells:
            continue
        d = load_entry(entry)
        for spec in config.models:
            if not any(c.model == str(spec.kind) for c in cells):
                continue
            path = out_dir / f"{entry.name}__{spec.kind}.json"
            path.write_text(fit_bundle(spec, d, entry, config, pca_datasets).to_json(), encoding="utf-8")
            written.append(path)
    return written
