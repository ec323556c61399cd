"""Rendering and re-reading of benchmark artifacts.

Artifacts written to the output directory:
    table.md      Markdown grid, models as rows, datasets as columns
    table.csv     the same grid, values only
    table.json    full BenchmarkTable including baselines and metadata
    folds.jsonl   one FoldRecord per line
"""

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from pydantic import ValidationError

from defect_bench.constants import MODEL_LABELS, PUBLISHED_ACCURACY
from defect_bench.errors import EvaluationError
from defect_bench.evaluation.benchmark import BenchmarkRun
from defect_bench.evaluation.metrics import METRICS, aggregate_folds, fold_metric
from defect_bench.models.outputs import BenchmarkTable, CellResult, FoldRecord, MetricsReport

NA = "N/A"
ERR = "ERR"
BASELINE_LABEL = "All-negative baseline"

_GREEN = "\033[32m"
_RED = "\033[31m"
_RESET = "\033[0m"


def format_percent(fraction: float | None) -> str:
    """A [0, 1] fraction as a percentage with one decimal."""
    if fraction is None:
        return NA
    return f"{100.0 * fraction:.1f}"


def _cell_text(cell: CellResult) -> str:
    if cell.status == "na":
        return NA
    if cell.status == "error" or cell.metrics is None:
        return ERR
    return format_percent(cell.metrics.mean_accuracy)


def render_markdown(table: BenchmarkTable) -> str:
    lines = [f"# Mean {table.metadata.k}-fold CV accuracy (%)", ""]
    lines += [f"- {note}" for note in table.metadata.notes]
    if table.metadata.notes:
        lines.append("")
    lines.append("| Model | " + " | ".join(table.datasets) + " |")
    lines.append("|---|" + "---:|" * len(table.datasets))
    for model in table.models:
        row = [_cell_text(table.cell(model, dataset)) for dataset in table.datasets]
        lines.append(f"| {MODEL_LABELS.get(model, model)} | " + " | ".join(row) + " |")
    baseline = [format_percent(table.baselines.get(dataset)) for dataset in table.datasets]
    lines.append(f"| {BASELINE_LABEL} | " + " | ".join(baseline) + " |")
    return "\n".join(lines) + "\n"


def render_csv(table: BenchmarkTable) -> str:
    """Accuracy grid only; no timestamps, so reruns are byte-identical."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["model", *table.datasets])
    for model in table.models:
        writer.writerow([model, *(_cell_text(table.cell(model, dataset)) for dataset in table.datasets)])
    return buffer.getvalue()


def folds_to_jsonl(records: Iterable[FoldRecord]) -> str:
    return "".join(record.model_dump_json() + "\n" for record in records)


def write_artifacts(run: BenchmarkRun, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    contents = {
        "table.md": render_markdown(run.table),
        "table.csv": render_csv(run.table),
        "table.json": run.table.model_dump_json(indent=2) + "\n",
        "folds.jsonl": folds_to_jsonl(run.folds),
    }
    written = []
    for name, text in contents.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def read_folds_jsonl(path: str | Path) -> list[FoldRecord]:
    """Parse folds.jsonl; blank lines are skipped, anything else must be a record."""
    records = []
    text = Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(FoldRecord.model_validate_json(line))
        except ValidationError as e:
            raise EvaluationError(f"{path}: line {number}: not a fold record: {e.errors()[0]['msg']}") from e
    if not records:
        raise EvaluationError(f"{path}: no fold records")
    return records


def group_records(records: Sequence[FoldRecord]) -> dict[tuple[str, str], list[FoldRecord]]:
    """Records keyed by (model, dataset), in first-seen order; duplicate folds rejected."""
    groups: dict[tuple[str, str], list[FoldRecord]] = {}
    for record in records:
        group = groups.setdefault((record.model, record.dataset), [])
        if any(r.fold == record.fold for r in group):
            raise EvaluationError(f"duplicate fold {record.fold} for ({record.model}, {record.dataset})")
        group.append(record)
    return groups


def reaggregate(records: Sequence[FoldRecord]) -> dict[tuple[str, str], MetricsReport]:
    """Cell metrics rebuilt from fold records without retraining."""
    return {key: aggregate_folds(group) for key, group in group_records(records).items()}


def metric_mean(group: Sequence[FoldRecord], metric: str) -> float:
    """Mean over folds of `metric`; for accuracy this equals the table's cell."""
    if metric == "accuracy":
        return aggregate_folds(group).mean_accuracy
    return float(np.mean([fold_metric(r, metric) for r in sorted(group, key=lambda r: r.fold)]))


def comparison_rows(records: Sequence[FoldRecord], metric: str = "accuracy", against_paper: bool = False) -> list[dict]:
    if metric not in METRICS:
        raise EvaluationError(f"unknown metric {metric!r}; choose from {METRICS}")
    rows = []
    for (model, dataset), group in group_records(records).items():
        ours = 100.0 * metric_mean(group, metric)
        row = {"model": model, "dataset": dataset, "folds": len(group), metric: round(ours, 1)}
        if against_paper:
            published = PUBLISHED_ACCURACY.get(model, {}).get(dataset)
            row["paper"] = published
            accuracy = ours if metric == "accuracy" else 100.0 * metric_mean(group, "accuracy")
            row["delta"] = None if published is None else round(accuracy - published, 1)
        rows.append(row)
    return rows


def _colored_delta(delta: float | None, color: bool) -> str:
    if delta is None:
        return NA
    text = f"{delta:+.1f}"
    if not color or delta == 0:
        return text
    return f"{_GREEN if delta > 0 else _RED}{text}{_RESET}"


def render_report(
    records: Sequence[FoldRecord],
    metric: str = "accuracy",
    against_paper: bool = False,
    fmt: str = "text",
    color: bool = False,
) -> str:
    rows = comparison_rows(records, metric, against_paper)
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: (NA if value is None else value) for key, value in row.items()})
        return buffer.getvalue()

    lines = []
    for row in rows:
        parts = [f"model={row['model']}", f"dataset={row['dataset']}", f"{metric}={row[metric]:.1f}"]
        if against_paper:
            paper = NA if row["paper"] is None else f"{row['paper']:.1f}"
            parts += [f"paper={paper}", f"delta={_colored_delta(row['delta'], color)}"]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
