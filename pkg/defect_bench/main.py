"""Command-line entry point.

Commands:
    profile  PATH                 dataset counts, faulty %, per-feature stats
    bench    [CONFIG]             cross-validate models x datasets, write artifacts
    report   FOLDS_JSONL          re-aggregate fold records, optionally vs. published results
    convert  SRC DST              ARFF <-> CSV
    predict  DATA --load-model F  score a dataset with a saved bundle

Exit codes: 0 success, 2 input or config error, 3 some benchmark cells failed.
"""

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml
from pydantic import ValidationError

from defect_bench import __version__
from defect_bench.config import get_config
from defect_bench.constants import (
    get_data_dir,
    get_default_k,
    get_default_master_seed,
    get_output_dir,
    get_pca_datasets,
)
from defect_bench.errors import ConfigError, DatasetError, DefectBenchError
from defect_bench.evaluation.benchmark import ModelBundle, run_benchmark, save_bundles
from defect_bench.evaluation.metrics import METRICS
from defect_bench.evaluation.reporting import read_folds_jsonl, render_csv, render_markdown, render_report, write_artifacts
from defect_bench.ingest.arff import serialize_arff
from defect_bench.ingest.csv_reader import serialize_csv
from defect_bench.ingest.loader import load_dataset, read_text
from defect_bench.ingest.profile import profile, profile_matches_published
from defect_bench.models.benchmark import BenchmarkConfig
from defect_bench.models.dataset import DatasetProfile, PublishedProfileCheck
from defect_bench.utils.logger import clear_run_context, generate_run_id, get_logger, set_run_context, setup_json_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_PARTIAL_FAILURE = 3

FORMATS = ("text", "csv", "json")


# ============================================================================
# PROFILE
# ============================================================================

def _flag(ok: bool) -> str:
    return "ok" if ok else "MISMATCH"


def _render_profile(p: DatasetProfile, check: PublishedProfileCheck | None, fmt: str) -> str:
    if fmt == "json":
        payload = p.model_dump(mode="json")
        payload["faulty_percent"] = p.faulty_percent
        payload["published_check"] = None if check is None else {**check.model_dump(mode="json"), "ok": check.ok}
        return json.dumps(payload, indent=2) + "\n"

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["name", "min", "max", "mean", "std", "missing_count"])
        for s in p.per_feature_stats:
            writer.writerow([s.name, s.min, s.max, s.mean, s.std, s.missing_count])
        return buffer.getvalue()

    lines = [
        f"dataset={p.name} instances={p.n_instances} attributes={p.n_features + 1} "
        f"features={p.n_features} faulty={p.faulty_percent:.1f}% missing={p.missing_count}"
    ]
    if check is not None:
        lines.append(
            f"published: instances={check.instances_expected} ({_flag(check.instances_ok)}) "
            f"attributes={check.attributes_expected} ({_flag(check.attributes_ok)}) "
            f"faulty={check.faulty_percent_expected:.2f}% ({_flag(check.faulty_ok)})"
        )
    lines.append(f"{'feature':<24} {'min':>12} {'max':>12} {'mean':>12} {'std':>12} {'missing':>8}")
    for s in p.per_feature_stats:
        values = ["N/A" if v is None else f"{v:.4g}" for v in (s.min, s.max, s.mean, s.std)]
        lines.append(f"{s.name:<24} " + " ".join(f"{v:>12}" for v in values) + f" {s.missing_count:>8}")
    return "\n".join(lines) + "\n"


def cmd_profile(args: argparse.Namespace) -> int:
    d = load_dataset(args.path, label_column=args.label_column)
    p = profile(d)
    sys.stdout.write(_render_profile(p, profile_matches_published(p), args.format))
    return EXIT_OK


# ============================================================================
# BENCH
# ============================================================================

def load_benchmark_config(path: str | None, args: argparse.Namespace) -> BenchmarkConfig:
    """File values, overridden by flags; without a file, the study's grid over the data directory."""
    overrides: dict[str, Any] = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.k is not None:
        overrides["k"] = args.k

    try:
        if path is None:
            names = args.datasets or list(get_config().study_settings.get("datasets", []))
            overrides.setdefault("k", get_default_k())
            overrides.setdefault("master_seed", get_default_master_seed())
            overrides.setdefault("output_dir", get_output_dir())
            config = BenchmarkConfig.study_default(args.data_dir or get_data_dir(), names, **overrides)
        else:
            raw = yaml.safe_load(read_text(path))
            if not isinstance(raw, dict):
                raise ConfigError(f"{path}: benchmark config must be a JSON object")
            config = BenchmarkConfig.model_validate({"output_dir": get_output_dir(), **raw, **overrides})
        if args.models:
            keep = set(args.models)
            config = config.model_copy(update={"models": [m for m in config.models if m.kind in keep]})
            if not config.models:
                raise ConfigError(f"none of the requested models are configured: {sorted(keep)}")
        if args.datasets and path is not None:
            keep = {name.upper() for name in args.datasets}
            config = config.model_copy(update={"datasets": [e for e in config.datasets if e.name in keep]})
            if not config.datasets:
                raise ConfigError(f"none of the requested datasets are configured: {sorted(keep)}")
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not valid JSON/YAML: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid benchmark config: {e}") from e
    return config


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_benchmark_config(args.config, args)
    pca_datasets = get_pca_datasets()
    jobs = config.jobs or get_config().default_jobs()
    out_dir = Path(config.output_dir)

    logger.info(
        "Benchmark started",
        extra={
            "models": [str(m.kind) for m in config.models],
            "datasets": [e.name for e in config.datasets],
            "k": config.k,
            "master_seed": config.master_seed,
            "jobs": jobs,
        },
    )
    run = run_benchmark(config, pca_datasets=pca_datasets, jobs=jobs)
    write_artifacts(run, out_dir)
    resolved = config.resolved(pca_datasets)
    (out_dir / "config.resolved.json").write_text(resolved.model_dump_json(indent=2) + "\n", encoding="utf-8")

    if args.save_model:
        written = save_bundles(config, run.table, args.save_model, pca_datasets)
        logger.info("Model bundles saved", extra={"count": len(written), "directory": args.save_model})

    if args.format == "json":
        sys.stdout.write(run.table.model_dump_json(indent=2) + "\n")
    elif args.format == "csv":
        sys.stdout.write(render_csv(run.table))
    else:
        sys.stdout.write(render_markdown(run.table))

    if run.table.has_errors:
        failed = [f"{c.model}/{c.dataset}" for c in run.table.cells if c.status == "error"]
        logger.error("Some benchmark cells failed", extra={"cells": failed})
        return EXIT_PARTIAL_FAILURE
    return EXIT_OK


# ============================================================================
# REPORT / CONVERT / PREDICT
# ============================================================================

def cmd_report(args: argparse.Namespace) -> int:
    records = read_folds_jsonl(args.folds)
    color = get_config().settings.color_enabled and sys.stdout.isatty()
    sys.stdout.write(render_report(records, args.metric, args.against_paper, args.format, color))
    return EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    d = load_dataset(args.source, label_column=args.label_column)
    target = Path(args.target)
    suffix = target.suffix.lower()
    if suffix == ".csv":
        text = serialize_csv(d)
    elif suffix == ".arff":
        text = serialize_arff(d)
    else:
        raise DatasetError(f"unsupported output format {target.suffix!r} (expected .arff or .csv)")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info("Dataset converted", extra={"source": args.source, "target": str(target), "instances": d.n_instances})
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    bundle = ModelBundle.from_json(read_text(args.load_model))
    d = load_dataset(args.path, label_column=args.label_column)
    if d.feature_names != bundle.feature_names:
        raise DatasetError(
            f"{args.path}: feature columns {d.feature_names} do not match the saved model's {bundle.feature_names}"
        )
    proba = bundle.predict_proba(d.features)
    predicted = (proba >= args.threshold).astype(np.int64)

    if args.format == "json":
        rows = [
            {"row": i, "probability": float(p), "prediction": int(y), "label": int(t)}
            for i, (p, y, t) in enumerate(zip(proba, predicted, d.labels))
        ]
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["row", "probability", "prediction", "label"])
        for i, (p, y, t) in enumerate(zip(proba, predicted, d.labels)):
            writer.writerow([i, repr(float(p)), int(y), int(t)])
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed (default: from config)")
    common.add_argument("--jobs", type=int, default=None, help="Parallel workers (default: available processors)")
    common.add_argument("--format", choices=FORMATS, default="text", help="Output format on stdout")
    common.add_argument("--output-dir", default=None, help="Directory for benchmark artifacts")
    common.add_argument("--log-level", default=None, help="Logging level (default: DEFECT_BENCH_LOG_LEVEL or WARNING)")

    parser = argparse.ArgumentParser(prog="defect-bench", description="Software defect prediction benchmark")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="Profile a dataset file")
    p.add_argument("path")
    p.add_argument("--label-column", default=None, help="CSV label column (default: auto-detect)")
    p.set_defaults(handler=cmd_profile)

    p = sub.add_parser("bench", parents=[common], help="Run the cross-validated benchmark")
    p.add_argument("config", nargs="?", default=None, help="Benchmark config (JSON); default: all models on the study's datasets")
    p.add_argument("--data-dir", default=None, help="Fixture directory when no config file is given")
    p.add_argument("--datasets", nargs="+", default=None, help="Restrict to these dataset names")
    p.add_argument("--models", nargs="+", default=None, help="Restrict to these model kinds")
    p.add_argument("--k", type=int, default=None, help="Number of folds")
    p.add_argument("--save-model", default=None, metavar="DIR", help="Also fit every ok cell on its full dataset and save it")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("report", parents=[common], help="Re-aggregate a folds.jsonl file")
    p.add_argument("folds")
    p.add_argument("--metric", choices=METRICS, default="accuracy")
    p.add_argument("--against-paper", action="store_true", help="Compare accuracy with the published results")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("convert", parents=[common], help="Convert a dataset between ARFF and CSV")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--label-column", default=None)
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("predict", parents=[common], help="Score a dataset with a saved model bundle")
    p.add_argument("path")
    p.add_argument("--load-model", required=True, metavar="FILE")
    p.add_argument("--label-column", default=None)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(handler=cmd_predict)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_config().settings
    setup_json_logging(level=args.log_level or settings.log_level, fmt=settings.log_format)
    set_run_context(generate_run_id())
    try:
        return args.handler(args)
    except (DefectBenchError, OSError) as e:
        logger.error("Command failed", extra={"command": args.command, "error": str(e), "error_type": type(e).__name__})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    finally:
        clear_run_context()


if __name__ == "__main__":
    sys.exit(main())
