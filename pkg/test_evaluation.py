"""Tests for fold assignment, metrics, cross-validation and the benchmark runner.

The full-strength every-kind cross-validation check is slow; set
RUN_SLOW_TESTS=true to include it.
"""

import json
import os

import numpy as np
import pytest

from conftest import fixture_path, have_fixture, make_blobs, make_threshold_data
from defect_bench.errors import EvaluationError
from defect_bench.evaluation.benchmark import ModelBundle, run_benchmark, save_bundles
from defect_bench.evaluation.cross_validation import cross_validate, cross_validate_folds, run_fold
from defect_bench.evaluation.folds import stratified_kfold
from defect_bench.evaluation.metrics import (
    aggregate_folds,
    classification_metrics,
    confusion_counts,
    fold_metric,
    majority_baseline,
)
from defect_bench.evaluation.reporting import (
    BASELINE_LABEL,
    group_records,
    read_folds_jsonl,
    reaggregate,
    render_csv,
    render_markdown,
    render_report,
    write_artifacts,
)
from defect_bench.ingest.arff import serialize_arff
from defect_bench.ingest.loader import load_dataset
from defect_bench.models.benchmark import BenchmarkConfig, DatasetEntry
from defect_bench.models.outputs import Confusion, FoldRecord
from defect_bench.models.pipeline import PipelineConfig
from defect_bench.models.specs import ModelKind, ModelSpec
from defect_bench.numerics.random import RandomSource

RUN_SLOW_TESTS = os.getenv("RUN_SLOW_TESTS", "false").lower() in ("true", "1", "yes")
HAVE_CM1 = have_fixture("CM1")


def _record(model: str, dataset: str, fold: int, tp: int, fp: int, tn: int, fn: int) -> FoldRecord:
    confusion = Confusion(tp=tp, fp=fp, tn=tn, fn=fn)
    return FoldRecord(
        dataset=dataset,
        model=model,
        fold=fold,
        seed=fold,
        confusion=confusion,
        accuracy=(tp + tn) / confusion.total,
        n_train=90,
        n_test=confusion.total,
        n_model_features=3,
        pipeline_checksum="p",
        model_checksum="m",
    )


def _write_synthetic(tmp_path, name: str = "SYN", n: int = 100, seed: int = 0):
    d = make_threshold_data(n=n, seed=seed)
    path = tmp_path / f"{name}.arff"
    path.write_text(serialize_arff(d.model_copy(update={"name": name})), encoding="utf-8")
    return path


def _without_timing(records):
    return [r.model_dump(exclude={"train_time_ms"}) for r in records]


# ============================================================================
# FOLDS
# ============================================================================

def test_folds_ten_balanced_instances():
    """5 clean + 5 faulty with k = 5: every fold holds one of each."""
    labels = np.array([0, 1] * 5)
    assignment = stratified_kfold(labels, 5, RandomSource(1))
    np.testing.assert_array_equal(assignment.fold_sizes, [2] * 5)
    for fold in range(5):
        assert labels[assignment.test_indices(fold)].sum() == 1


def test_folds_partition_rows():
    labels = (np.arange(103) % 4 == 0).astype(int)
    assignment = stratified_kfold(labels, 10, RandomSource(2))
    seen = np.concatenate([assignment.test_indices(f) for f in range(10)])
    np.testing.assert_array_equal(np.sort(seen), np.arange(103))
    assert assignment.fold_sizes.max() - assignment.fold_sizes.min() <= 1
    for fold in range(10):
        assert np.intersect1d(assignment.train_indices(fold), assignment.test_indices(fold)).size == 0


def test_folds_same_seed_same_assignment():
    labels = (np.arange(60) % 3 == 0).astype(int)
    a = stratified_kfold(labels, 10, RandomSource(3))
    b = stratified_kfold(labels, 10, RandomSource(3))
    np.testing.assert_array_equal(a.fold_of, b.fold_of)


def test_folds_need_k_members_per_class():
    with pytest.raises(EvaluationError):
        stratified_kfold(np.array([0] * 20 + [1] * 3), 5, RandomSource(4))
    with pytest.raises(EvaluationError):
        stratified_kfold(np.array([0, 1] * 5), 1, RandomSource(4))


def test_folds_cm1_shape():
    """449 clean and 49 faulty rows give folds of 49-50 rows with 4-5 faulty each."""
    labels = np.array([0] * 449 + [1] * 49)
    assignment = stratified_kfold(labels, 10, RandomSource(42))
    assert set(assignment.fold_sizes.tolist()) == {49, 50}
    faulty = [int(labels[assignment.test_indices(f)].sum()) for f in range(10)]
    assert set(faulty) == {4, 5}


@pytest.mark.skipif(not HAVE_CM1, reason="data/CM1.arff not present")
def test_folds_on_cm1_fixture():
    d = load_dataset(fixture_path("CM1"))
    assignment = stratified_kfold(d.labels, 10, RandomSource(42))
    assert set(assignment.fold_sizes.tolist()) <= {49, 50}


# ============================================================================
# METRICS
# ============================================================================

def test_metrics_example():
    """tp=1 fp=1 tn=7 fn=1: accuracy 0.8, precision = recall = f1 = 0.5."""
    y_true = np.array([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
    y_pred = np.array([1, 1, 0, 0, 0, 0, 0, 0, 0, 0])
    report = classification_metrics(y_true, y_pred)
    assert report.confusion == Confusion(tp=1, fp=1, tn=7, fn=1)
    assert report.accuracy == pytest.approx(0.8)
    assert report.precision == pytest.approx(0.5)
    assert report.recall == pytest.approx(0.5)
    assert report.f1 == pytest.approx(0.5)


def test_metrics_undefined_precision():
    report = classification_metrics([0, 1, 0], [0, 0, 0])
    assert report.precision == 0.0 and report.precision_undefined
    assert report.f1 == 0.0


def test_confusion_length_mismatch():
    with pytest.raises(EvaluationError):
        confusion_counts([0, 1], [0])


def test_aggregate_folds_pools_and_averages():
    records = [_record("svm", "CM1", 1, 1, 0, 3, 0), _record("svm", "CM1", 0, 0, 1, 2, 1)]
    report = aggregate_folds(records)
    assert report.per_fold_accuracy == [0.5, 1.0]
    assert report.mean_accuracy == pytest.approx(0.75)
    assert report.std_accuracy == pytest.approx(0.25)
    assert report.confusion == Confusion(tp=1, fp=1, tn=5, fn=1)
    assert fold_metric(records[1], "recall") == 0.0


def test_majority_baseline():
    assert majority_baseline([0, 0, 0, 1]) == 0.75
    with pytest.raises(EvaluationError):
        majority_baseline([])


# ============================================================================
# CROSS-VALIDATION
# ============================================================================

def test_cross_validation_on_separable_data(threshold_data):
    for kind in (ModelKind.LOGISTIC_REGRESSION, ModelKind.NAIVE_BAYES):
        report = cross_validate(ModelSpec.default(kind), threshold_data, PipelineConfig(), k=10, seed=1)
        assert report.mean_accuracy >= 0.95
        assert len(report.per_fold_accuracy) == 10


@pytest.mark.parametrize("kind", list(ModelKind))
def test_every_kind_separates_blobs_at_defaults(kind, blobs):
    """Two 6-sigma Gaussian blobs are easy for every classifier with ledger hyperparameters."""
    report = cross_validate(ModelSpec.default(kind), blobs, PipelineConfig(), k=10, seed=42)
    assert report.mean_accuracy >= 0.95


@pytest.mark.slow
@pytest.mark.skipif(not RUN_SLOW_TESTS, reason="Set RUN_SLOW_TESTS=true to cross-validate every model kind")
@pytest.mark.parametrize("kind", list(ModelKind))
def test_every_kind_separates_threshold_data(kind):
    overrides = {"learning_rate": 1e-2} if kind == ModelKind.ANN else {}
    report = cross_validate(ModelSpec.default(kind, **overrides), make_threshold_data(), PipelineConfig(), k=10)
    assert report.mean_accuracy >= 0.95


def test_cross_validation_k_too_large():
    d = make_blobs(n=12, p=2)
    with pytest.raises(EvaluationError):
        cross_validate(ModelSpec.default("naive_bayes"), d, PipelineConfig(), k=10)


def test_cross_validation_is_deterministic(blobs):
    spec = ModelSpec.default("random_forest", n_trees=5)
    a = cross_validate_folds(spec, blobs, PipelineConfig(), k=5, seed=7)
    b = cross_validate_folds(spec, blobs, PipelineConfig(), k=5, seed=7)
    assert _without_timing([r.record for r in a]) == _without_timing([r.record for r in b])
    assert [r.record.fold for r in a] == list(range(5))


def test_fold_state_ignores_test_rows(blobs):
    """Rewriting a fold's test rows leaves that fold's fitted state untouched."""
    spec = ModelSpec.default("logistic_regression")
    config = PipelineConfig(use_pca=True)
    assignment = stratified_kfold(blobs.labels, 5, RandomSource(11))
    test_rows = assignment.test_indices(0)
    altered = blobs.features.copy()
    altered[test_rows] = 1e6
    changed = blobs.with_features(altered)

    before = run_fold(spec, blobs, config, assignment, 0, master_seed=11)
    after = run_fold(spec, changed, config, assignment, 0, master_seed=11)
    assert before.record.pipeline_checksum == after.record.pipeline_checksum
    assert before.record.model_checksum == after.record.model_checksum


def test_cross_validation_imputes_per_fold():
    d = make_threshold_data(n=100, seed=3)
    features = d.features.copy()
    features[::7, 1] = np.nan
    gappy = d.with_features(features)
    report = cross_validate(ModelSpec.default("naive_bayes"), gappy, PipelineConfig(), k=5)
    assert report.confusion.total == 100
    dropped = cross_validate(ModelSpec.default("naive_bayes"), gappy, PipelineConfig(), k=5, impute="drop_rows")
    assert dropped.confusion.total == 100 - len(range(0, 100, 7))


# ============================================================================
# BENCHMARK
# ============================================================================

def test_benchmark_single_cell(tmp_path):
    path = _write_synthetic(tmp_path)
    config = BenchmarkConfig(
        datasets=[DatasetEntry(name="SYN", path=str(path))],
        models=["naive_bayes"],
        k=5,
        master_seed=3,
    )
    run = run_benchmark(config, pca_datasets=[])
    cell = run.table.cell("naive_bayes", "SYN")
    assert cell.status == "ok"
    assert cell.metrics.mean_accuracy >= 0.95
    assert len(run.folds) == 5
    assert run.table.baselines["SYN"] == pytest.approx(0.5)
    assert run.table.metadata.fixture_checksums["SYN"]
    assert not run.table.has_errors


def test_benchmark_missing_dataset_is_na(tmp_path):
    path = _write_synthetic(tmp_path)
    config = BenchmarkConfig(
        datasets=[
            DatasetEntry(name="SYN", path=str(path)),
            DatasetEntry(name="GONE", path=str(tmp_path / "GONE.arff")),
        ],
        models=["naive_bayes", "logistic_regression"],
        k=5,
    )
    run = run_benchmark(config, pca_datasets=[])
    assert run.table.cell("logistic_regression", "GONE").status == "na"
    assert run.table.baselines["GONE"] is None
    csv_lines = render_csv(run.table).splitlines()
    assert csv_lines[0] == "model,SYN,GONE"
    assert csv_lines[1].startswith("naive_bayes,") and csv_lines[1].endswith(",N/A")
    markdown = render_markdown(run.table)
    assert "# Mean 5-fold CV accuracy (%)" in markdown
    assert f"| {BASELINE_LABEL} | 50.0 | N/A |" in markdown


def test_benchmark_bad_dataset_is_error(tmp_path):
    bad = tmp_path / "BAD.arff"
    bad.write_text("@relation bad\n@attribute a numeric\n", encoding="utf-8")
    config = BenchmarkConfig(datasets=[DatasetEntry(name="BAD", path=str(bad))], models=["svm"], k=5)
    run = run_benchmark(config, pca_datasets=[])
    assert run.table.cell("svm", "BAD").status == "error"
    assert run.table.has_errors


def test_artifacts_reaggregate_exactly(tmp_path):
    path = _write_synthetic(tmp_path)
    config = BenchmarkConfig(
        datasets=[DatasetEntry(name="SYN", path=str(path))],
        models=["naive_bayes", "logistic_regression"],
        k=5,
    )
    run = run_benchmark(config, pca_datasets=[])
    written = write_artifacts(run, tmp_path / "out")
    assert sorted(p.name for p in written) == ["folds.jsonl", "table.csv", "table.json", "table.md"]

    rebuilt = reaggregate(read_folds_jsonl(tmp_path / "out" / "folds.jsonl"))
    for (model, dataset), report in rebuilt.items():
        cell = run.table.cell(model, dataset)
        assert abs(report.mean_accuracy - cell.metrics.mean_accuracy) <= 1e-12
    table = json.loads((tmp_path / "out" / "table.json").read_text(encoding="utf-8"))
    assert table["models"] == ["naive_bayes", "logistic_regression"]


def test_benchmark_rerun_is_identical(tmp_path):
    path = _write_synthetic(tmp_path)
    config = BenchmarkConfig(datasets=[DatasetEntry(name="SYN", path=str(path))], models=["svm"], k=5)
    a = run_benchmark(config, pca_datasets=[])
    b = run_benchmark(config, pca_datasets=[])
    assert render_csv(a.table) == render_csv(b.table)
    assert _without_timing(a.folds) == _without_timing(b.folds)


def test_benchmark_parallel_folds_match_sequential(tmp_path):
    path = _write_synthetic(tmp_path)
    config = BenchmarkConfig(
        datasets=[DatasetEntry(name="SYN", path=str(path))],
        models=["naive_bayes", "svm"],
        k=5,
    )
    sequential = run_benchmark(config, pca_datasets=[], jobs=1)
    parallel = run_benchmark(config, pca_datasets=[], jobs=2)
    assert render_csv(parallel.table) == render_csv(sequential.table)
    assert _without_timing(parallel.folds) == _without_timing(sequential.folds)
    assert [(r.model, r.fold) for r in parallel.folds] == [(m, f) for m in ("naive_bayes", "svm") for f in range(5)]


def test_benchmark_unsplittable_dataset_is_error(tmp_path):
    d = make_threshold_data(n=40, seed=6)
    labels = np.zeros(40, dtype=int)
    labels[:3] = 1
    path = tmp_path / "FEW.arff"
    path.write_text(serialize_arff(d.model_copy(update={"name": "FEW", "labels": labels})), encoding="utf-8")
    config = BenchmarkConfig(datasets=[DatasetEntry(name="FEW", path=str(path))], models=["naive_bayes"], k=5)
    run = run_benchmark(config, pca_datasets=[])
    cell = run.table.cell("naive_bayes", "FEW")
    assert cell.status == "error"
    assert cell.error.startswith("EvaluationError")
    assert run.folds == []


def test_saved_bundle_scores_raw_rows(tmp_path):
    path = _write_synthetic(tmp_path)
    config = BenchmarkConfig(datasets=[DatasetEntry(name="SYN", path=str(path))], models=["logistic_regression"], k=5)
    run = run_benchmark(config, pca_datasets=[])
    written = save_bundles(config, run.table, tmp_path / "models", pca_datasets=[])
    assert [p.name for p in written] == ["SYN__logistic_regression.json"]

    bundle = ModelBundle.from_json(written[0].read_text(encoding="utf-8"))
    d = load_dataset(path)
    proba = bundle.predict_proba(d.features)
    assert proba.shape == (d.n_instances,)
    assert np.mean((proba >= 0.5) == d.labels) >= 0.95


# ============================================================================
# REPORTING
# ============================================================================

def test_report_against_published_numbers():
    records = [_record("ann", "PC1", f, 0, 0, 9, 1) for f in range(10)]
    text = render_report(records, against_paper=True)
    assert text.strip() == "model=ann dataset=PC1 accuracy=90.0 paper=93.0 delta=-3.0"


def test_report_other_metric_and_json():
    records = [_record("svm", "CM1", 0, 1, 1, 7, 1), _record("svm", "CM1", 1, 1, 0, 8, 1)]
    rows = json.loads(render_report(records, metric="recall", fmt="json"))
    assert rows == [{"model": "svm", "dataset": "CM1", "folds": 2, "recall": 50.0}]
    with pytest.raises(EvaluationError):
        render_report(records, metric="auc")


def test_duplicate_folds_rejected():
    with pytest.raises(EvaluationError):
        group_records([_record("svm", "CM1", 0, 1, 0, 1, 0)] * 2)


def test_read_folds_rejects_empty_and_corrupt(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(EvaluationError):
        read_folds_jsonl(empty)
    corrupt = tmp_path / "corrupt.jsonl"
    corrupt.write_text('{"dataset": "CM1"}\n', encoding="utf-8")
    with pytest.raises(EvaluationError):
        read_folds_jsonl(corrupt)
