"""Classification metrics and their aggregation over folds."""

from typing import Sequence

import numpy as np

from defect_bench.errors import EvaluationError
from defect_bench.models.outputs import Confusion, FoldRecord, MetricsReport

METRICS = ("accuracy", "precision", "recall", "f1")


def confusion_counts(y_true, y_pred) -> Confusion:
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    if y_true.size != y_pred.size:
        raise EvaluationError(f"{y_true.size} labels vs {y_pred.size} predictions")
    if y_true.size == 0:
        raise EvaluationError("no instances to evaluate")
    t, p = y_true == 1, y_pred == 1
    return Confusion(
        tp=int(np.sum(t & p)),
        fp=int(np.sum(~t & p)),
        tn=int(np.sum(~t & ~p)),
        fn=int(np.sum(t & ~p)),
    )


def summarize(confusion: Confusion, per_fold_accuracy: Sequence[float]) -> MetricsReport:
    """Metrics of a pooled confusion plus the mean/std of per-fold accuracies."""
    if confusion.total == 0:
        raise EvaluationError("no instances to evaluate")
    predicted_pos = confusion.tp + confusion.fp
    actual_pos = confusion.tp + confusion.fn
    precision = confusion.tp / predicted_pos if predicted_pos else 0.0
    recall = confusion.tp / actual_pos if actual_pos else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    folds = np.asarray(per_fold_accuracy, dtype=np.float64)
    return MetricsReport(
        confusion=confusion,
        accuracy=(confusion.tp + confusion.tn) / confusion.total,
        precision=precision,
        recall=recall,
        f1=f1,
        precision_undefined=predicted_pos == 0,
        recall_undefined=actual_pos == 0,
        per_fold_accuracy=folds.tolist(),
        mean_accuracy=float(folds.mean()) if folds.size else 0.0,
        std_accuracy=float(folds.std()) if folds.size else 0.0,
    )


def classification_metrics(y_true, y_pred) -> MetricsReport:
    """Single-evaluation report; its one 'fold' is the whole input."""
    confusion = confusion_counts(y_true, y_pred)
    accuracy = (confusion.tp + confusion.tn) / confusion.total
    return summarize(confusion, [accuracy])


def aggregate_folds(records: Sequence[FoldRecord]) -> MetricsReport:
    """Pooled confusion and per-fold accuracies, in fold order."""
    if not records:
        raise EvaluationError("no fold records to aggregate")
    ordered = sorted(records, key=lambda r: r.fold)
    pooled = Confusion()
    for record in ordered:
        pooled = pooled + record.confusion
    return summarize(pooled, [r.accuracy for r in ordered])


def fold_metric(record: FoldRecord, metric: str) -> float:
    """`metric` of a single fold's confusion."""
    if metric not in METRICS:
        raise EvaluationError(f"unknown metric {metric!r}; choose from {METRICS}")
    return float(getattr(summarize(record.confusion, [record.accuracy]), metric))


def majority_baseline(labels) -> float:
    """Accuracy of predicting 'clean' for every instance."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EvaluationError("no labels")
    return float(np.mean(labels == 0))
