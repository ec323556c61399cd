"""File-level entry points: read a dataset from disk by extension."""

import hashlib
from pathlib import Path

from defect_bench.errors import DatasetError
from defect_bench.ingest.arff import parse_arff
from defect_bench.ingest.csv_reader import default_label_column, parse_csv
from defect_bench.models.dataset import Dataset


def read_text(path: str | Path) -> str:
    """UTF-8 text of `path`; a leading BOM is dropped."""
    return Path(path).read_text(encoding="utf-8-sig")


def load_dataset(path: str | Path, name: str | None = None, label_column: str | None = None) -> Dataset:
    """Parse `.arff` or `.csv`; the dataset is named after the file stem by default."""
    path = Path(path)
    text = read_text(path)
    name = name or path.stem
    suffix = path.suffix.lower()
    if suffix == ".arff":
        return parse_arff(text, name=name, source_path=str(path))
    if suffix == ".csv":
        return parse_csv(text, label_column or default_label_column(text), name=name, source_path=str(path))
    raise DatasetError(f"unsupported dataset format {path.suffix!r} (expected .arff or .csv)")


def file_checksum(path: str | Path) -> str:
    """sha256 of the file bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
