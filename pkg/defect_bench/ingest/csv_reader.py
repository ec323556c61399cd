"""CSV reader and writer for defect datasets."""

import csv
import io

import numpy as np

from defect_bench.constants import CLASS_ATTRIBUTE_NAMES
from defect_bench.errors import ArityError, EmptyDataError, MalformedHeaderError, UnknownColumnError
from defect_bench.ingest.tokens import parse_feature, parse_label
from defect_bench.models.dataset import Dataset
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)


def _resolve_label_column(header: list[str], label_column: str) -> int:
    if label_column in header:
        return header.index(label_column)
    folded = [i for i, col in enumerate(header) if col.lower() == label_column.lower()]
    if len(folded) == 1:
        return folded[0]
    raise UnknownColumnError(f"label column {label_column!r} not in header {header}", 1)


def default_label_column(text: str) -> str:
    """defects/label/problems if the header has one, else the last column."""
    header = next(csv.reader(io.StringIO(text.lstrip("\ufeff"))), [])
    if not header:
        raise MalformedHeaderError("empty CSV header", 1)
    header = [col.strip() for col in header]
    for col in header:
        if col.lower() in CLASS_ATTRIBUTE_NAMES:
            return col
    return header[-1]


def parse_csv(text: str, label_column: str, name: str | None = None, source_path: str = "") -> Dataset:
    """Parse a headed CSV; empty cells and `?` are missing."""
    reader = csv.reader(io.StringIO(text.lstrip("\ufeff")), skipinitialspace=True)
    header_row = next(reader, None)
    if not header_row or all(not col.strip() for col in header_row):
        raise MalformedHeaderError("empty CSV header", 1)
    header = [col.strip() for col in header_row]
    if len(set(header)) != len(header):
        raise MalformedHeaderError("duplicate column names", 1)
    label_index = _resolve_label_column(header, label_column)
    feature_indices = [i for i in range(len(header)) if i != label_index]

    feature_rows: list[list[float]] = []
    labels: list[int] = []
    for row in reader:
        number = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ArityError(f"expected {len(header)} values, found {len(row)}", number)
        feature_rows.append([parse_feature(row[i], number, header[i]) for i in feature_indices])
        labels.append(parse_label(row[label_index], number, header[label_index]))

    if not labels:
        raise EmptyDataError("CSV has no data rows", 1)

    dataset = Dataset(
        name=name or "DATASET",
        features=np.array(feature_rows, dtype=np.float64).reshape(len(labels), len(feature_indices)),
        labels=np.array(labels, dtype=np.int64),
        feature_names=[header[i] for i in feature_indices],
        source_path=source_path,
    )
    logger.debug(
        "CSV dataset parsed",
        extra={
            "dataset": dataset.name,
            "instances": dataset.n_instances,
            "features": dataset.n_features,
            "missing": dataset.missing_count,
        },
    )
    return dataset


def serialize_csv(d: Dataset, label_column: str = "defects") -> str:
    """CSV with the label as the last column (1 = defective), `?` for missing."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([*d.feature_names, label_column])
    for row, label in zip(d.features, d.labels):
        writer.writerow([*("?" if np.isnan(v) else repr(float(v)) for v in row), int(label)])
    return out.getvalue()
