"""Reader and writer for the ARFF subset the Promise defect datasets use.

Supported: `%` comment lines, `@relation`, `@attribute <name>
numeric|real|integer|{v1,v2,...}`, `@data` with comma-separated dense rows,
`?` for missing values. Keywords are case-insensitive; LF and CRLF both work.
"""

import csv
import re
from dataclasses import dataclass

import numpy as np

from defect_bench.constants import CLASS_ATTRIBUTE_NAMES
from defect_bench.errors import (
    ArityError,
    ClassAttributeError,
    EmptyDataError,
    MalformedHeaderError,
    NominalFeatureError,
    ParseError,
)
from defect_bench.ingest.tokens import label_kind, parse_feature, parse_label, unquote
from defect_bench.models.dataset import Dataset
from defect_bench.utils.logger import get_logger

logger = get_logger(__name__)

_ATTRIBUTE_RE = re.compile(
    r"""^@attribute\s+('(?:[^']*)'|"(?:[^"]*)"|\S+)\s+(.+?)\s*$""",
    re.IGNORECASE,
)
_NUMERIC_TYPES = {"numeric", "real", "integer"}


@dataclass(frozen=True)
class Attribute:
    """One `@attribute` declaration."""

    name: str
    nominal_values: tuple[str, ...] | None
    line: int

    @property
    def is_nominal(self) -> bool:
        return self.nominal_values is not None


def _parse_attribute(line_text: str, line: int) -> Attribute:
    match = _ATTRIBUTE_RE.match(line_text)
    if match is None:
        raise MalformedHeaderError(f"malformed attribute declaration {line_text!r}", line)
    name = unquote(match.group(1))
    type_text = match.group(2).strip()

    if type_text.startswith("{"):
        if not type_text.endswith("}"):
            raise MalformedHeaderError(f"unterminated nominal list for '{name}'", line)
        inner = type_text[1:-1]
        values = tuple(unquote(v) for v in next(csv.reader([inner], skipinitialspace=True), []))
        if not values or any(v == "" for v in values):
            raise MalformedHeaderError(f"empty nominal value in '{name}'", line)
        return Attribute(name=name, nominal_values=values, line=line)

    if type_text.lower() not in _NUMERIC_TYPES:
        raise MalformedHeaderError(f"unsupported attribute type {type_text!r} for '{name}'", line)
    return Attribute(name=name, nominal_values=None, line=line)


def find_class_attribute(attributes: list[Attribute]) -> int:
    """Index of the class attribute.

    An attribute named defects/label/problems wins; otherwise the last
    attribute, which must then be nominal.
    """
    for i, attr in enumerate(attributes):
        if attr.name.lower() in CLASS_ATTRIBUTE_NAMES:
            return i
    last = attributes[-1]
    if not last.is_nominal:
        raise ClassAttributeError(
            "no attribute named defects/label/problems and the last attribute is not nominal",
            last.line,
        )
    return len(attributes) - 1


def _nominal_label_map(attr: Attribute) -> dict[str, int]:
    values = attr.nominal_values or ()
    if len(values) != 2:
        raise ClassAttributeError(
            f"class attribute '{attr.name}' must have exactly 2 values, has {len(values)}",
            attr.line,
        )
    defective = [v for v in values if label_kind(v) == 1]
    if len(defective) != 1:
        raise ClassAttributeError(
            f"cannot tell which of {list(values)} marks a defective module",
            attr.line,
        )
    return {v: (1 if v == defective[0] else 0) for v in values}


def parse_arff(text: str, name: str | None = None, source_path: str = "") -> Dataset:
    """Parse an ARFF document into a Dataset; missing features stay NaN.

    `name` overrides the `@relation` name (loaders pass the file stem).
    """
    relation: str | None = None
    attributes: list[Attribute] = []
    data_line: int | None = None
    rows: list[tuple[int, str]] = []

    for number, raw in enumerate(text.lstrip("\ufeff").splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if data_line is not None:
            rows.append((number, stripped))
            continue
        keyword = stripped.split(None, 1)[0].lower()
        if keyword == "@relation":
            parts = stripped.split(None, 1)
            if len(parts) < 2:
                raise MalformedHeaderError("@relation without a name", number)
            relation = unquote(parts[1])
        elif keyword == "@attribute":
            attributes.append(_parse_attribute(stripped, number))
        elif keyword == "@data":
            data_line = number
        else:
            raise MalformedHeaderError(f"unexpected header line {stripped!r}", number)

    if data_line is None:
        raise MalformedHeaderError("missing @data section")
    if not attributes:
        raise MalformedHeaderError("no @attribute declarations", data_line)
    names = [attr.name for attr in attributes]
    if len(set(names)) != len(names):
        raise MalformedHeaderError("duplicate attribute names", data_line)
    if not rows:
        raise EmptyDataError("@data section has no rows", data_line)

    class_index = find_class_attribute(attributes)
    class_attr = attributes[class_index]
    label_map = _nominal_label_map(class_attr) if class_attr.is_nominal else None
    feature_indices = [i for i in range(len(attributes)) if i != class_index]
    for i in feature_indices:
        if attributes[i].is_nominal:
            raise NominalFeatureError(f"nominal feature '{attributes[i].name}' is not supported", attributes[i].line)

    features = np.empty((len(rows), len(feature_indices)), dtype=np.float64)
    labels = np.empty(len(rows), dtype=np.int64)
    for r, (number, row_text) in enumerate(rows):
        if row_text.startswith("{"):
            raise ParseError("sparse ARFF rows are not supported", number)
        tokens = next(csv.reader([row_text], skipinitialspace=True))
        if len(tokens) != len(attributes):
            raise ArityError(f"expected {len(attributes)} values, found {len(tokens)}", number)
        for c, i in enumerate(feature_indices):
            features[r, c] = parse_feature(tokens[i], number, attributes[i].name)
        label_token = unquote(tokens[class_index])
        if label_map is not None:
            if label_token not in label_map:
                raise ClassAttributeError(f"label {label_token!r} not declared for '{class_attr.name}'", number)
            labels[r] = label_map[label_token]
        else:
            labels[r] = parse_label(label_token, number, class_attr.name)

    dataset = Dataset(
        name=name or relation or "DATASET",
        features=features,
        labels=labels,
        feature_names=[attributes[i].name for i in feature_indices],
        source_path=source_path,
    )
    logger.debug(
        "ARFF dataset parsed",
        extra={
            "dataset": dataset.name,
            "instances": dataset.n_instances,
            "features": dataset.n_features,
            "missing": dataset.missing_count,
        },
    )
    return dataset


def _quote_name(name: str) -> str:
    if not name or re.search(r"[\s,'\"{}%]", name):
        quote = '"' if "'" in name else "'"
        return f"{quote}{name}{quote}"
    return name


def _format_value(value: float) -> str:
    return "?" if np.isnan(value) else repr(float(value))


def serialize_arff(d: Dataset, class_name: str = "defects") -> str:
    """ARFF text that `parse_arff` reads back into an equal Dataset."""
    lines = [f"@relation {_quote_name(d.name)}", ""]
    lines += [f"@attribute {_quote_name(n)} numeric" for n in d.feature_names]
    lines += [f"@attribute {class_name} {{false,true}}", "", "@data"]
    for row, label in zip(d.features, d.labels):
        cells = [_format_value(v) for v in row]
        cells.append("true" if label == 1 else "false")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
