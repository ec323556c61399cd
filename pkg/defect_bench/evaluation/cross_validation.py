"""Leakage-free k-fold cross-validation of one model on one dataset.

Everything fitted in a fold (imputation medians, the preprocessing
pipeline, the model and the ANN's validation split) sees only that fold's
training rows.
"""

import hashlib
import json
import logging
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel

from defect_bench.classifiers.base import TrainedModel
from defect_bench.classifiers.registry import train_model
from defect_bench.constants import SEED_OFFSET_FOLDS, SEED_OFFSET_MODEL
from defect_bench.evaluation.folds import FoldAssignment, stratified_kfold
from defect_bench.evaluation.metrics import aggregate_folds, confusion_counts
from defect_bench.ingest.impute import column_medians, fill_missing, impute_missing
from defect_bench.models.benchmark import ImputeStrategy
from defect_bench.models.dataset import Dataset
from defect_bench.models.outputs import FoldRecord, MetricsReport
from defect_bench.models.pipeline import FittedPipeline, PipelineConfig
from defect_bench.models.specs import ModelSpec
from defect_bench.numerics.random import RandomSource, derive_seed
from defect_bench.preprocess.pipeline import apply_pipeline, fit_pipeline
from defect_bench.utils.logger import TimingContext, get_logger

logger = get_logger(__name__)


def state_checksum(state: BaseModel) -> str:
    """sha256 of the canonical JSON form of a fitted pipeline or model."""
    canonical = json.dumps(state.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class FoldResult:
    record: FoldRecord
    pipeline: FittedPipeline
    model: TrainedModel


def fold_model_seed(master_seed: int, fold: int) -> int:
    return derive_seed(master_seed, SEED_OFFSET_MODEL, fold)


def fit_fold(spec: ModelSpec, train: Dataset, pipeline_config: PipelineConfig) -> tuple[FittedPipeline, TrainedModel, np.ndarray | None]:
    """Median fill values (if any are missing), pipeline and model for one training portion."""
    medians = None
    if train.missing_count:
        medians = column_medians(train)
        train = train.with_features(fill_missing(train.features, medians))
    pipeline = fit_pipeline(train, pipeline_config)
    model = train_model(spec, apply_pipeline(pipeline, train.features), train.labels)
    return pipeline, model, medians


def run_fold(
    spec: ModelSpec,
    d: Dataset,
    pipeline_config: PipelineConfig,
    assignment: FoldAssignment,
    fold: int,
    master_seed: int,
) -> FoldResult:
    fold_spec = spec.with_seed(fold_model_seed(master_seed, fold))
    train_rows = assignment.train_indices(fold)
    test_rows = assignment.test_indices(fold)
    train = d.subset(train_rows)

    log_extra = {"dataset": d.name, "model": str(spec.kind), "fold": fold}
    with TimingContext(logger, "Fold training", extra=log_extra, level=logging.INFO) as timer:
        pipeline, model, medians = fit_fold(fold_spec, train, pipeline_config)

    x_test = d.features[test_rows]
    if medians is not None:
        x_test = fill_missing(x_test, medians)
    y_test = d.labels[test_rows]
    confusion = confusion_counts(y_test, model.predict(apply_pipeline(pipeline, x_test)))

    record = FoldRecord(
        dataset=d.name,
        model=str(spec.kind),
        fold=fold,
        seed=fold_spec.seed,
        confusion=confusion,
        accuracy=(confusion.tp + confusion.tn) / confusion.total,
        train_time_ms=timer.duration_ms,
        n_train=int(train_rows.size),
        n_test=int(test_rows.size),
        n_model_features=model.n_features,
        pipeline_checksum=state_checksum(pipeline),
        model_checksum=state_checksum(model),
    )
    return FoldResult(record=record, pipeline=pipeline, model=model)


def prepare_folds(
    d: Dataset,
    k: int,
    seed: int,
    impute: ImputeStrategy = "median",
) -> tuple[Dataset, FoldAssignment]:
    """Dataset as the folds see it and its stratified fold assignment."""
    if impute == "drop_rows":
        # row-local, so safe to apply before splitting
        d = impute_missing(d, "drop_rows")
    return d, stratified_kfold(d.labels, k, RandomSource(derive_seed(seed, SEED_OFFSET_FOLDS)), d.name)


def cross_validate_folds(
    spec: ModelSpec,
    d: Dataset,
    pipeline_config: PipelineConfig,
    k: int = 10,
    seed: int = 42,
    impute: ImputeStrategy = "median",
    jobs: int = 1,
) -> list[FoldResult]:
    """Per-fold results ordered by fold index."""
    d, assignment = prepare_folds(d, k, seed, impute)
    if jobs == 1:
        results = [run_fold(spec, d, pipeline_config, assignment, fold, seed) for fold in range(k)]
    else:
        results = Parallel(n_jobs=jobs)(
            delayed(run_fold)(spec, d, pipeline_config, assignment, fold, seed) for fold in range(k)
        )
    return sorted(results, key=lambda r: r.record.fold)


def cross_validate(
    spec: ModelSpec,
    d: Dataset,
    pipeline_config: PipelineConfig,
    k: int = 10,
    seed: int = 42,
    impute: ImputeStrategy = "median",
    jobs: int = 1,
) -> MetricsReport:
    """Mean k-fold accuracy and pooled confusion metrics."""
    results = cross_validate_folds(spec, d, pipeline_config, k, seed, impute, jobs)
    return aggregate_folds([r.record for r in results])
