"""Cell-level parsing shared by the ARFF and CSV readers."""

import math

from defect_bench.constants import CLEAN_TOKENS, DEFECTIVE_TOKENS
from defect_bench.errors import ClassAttributeError, NonNumericValueError

MISSING_TOKENS = frozenset({"?", ""})


def unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def parse_feature(token: str, line: int, column: str) -> float:
    """Real value of a feature cell; NaN for a missing marker."""
    token = unquote(token)
    if token in MISSING_TOKENS:
        return math.nan
    try:
        value = float(token)
    except ValueError:
        raise NonNumericValueError(f"feature '{column}': non-numeric value {token!r}", line) from None
    if not math.isfinite(value):
        raise NonNumericValueError(f"feature '{column}': non-finite value {token!r}", line)
    return value


def label_kind(token: str) -> int | None:
    """1 for a defective marker, 0 for a clean one, None if unrecognized."""
    norm = unquote(token).lower().strip("_")
    if norm in DEFECTIVE_TOKENS:
        return 1
    if norm in CLEAN_TOKENS:
        return 0
    try:
        number = float(norm)
    except ValueError:
        return None
    if number == 1.0:
        return 1
    if number == 0.0:
        return 0
    return None


def parse_label(token: str, line: int, column: str) -> int:
    value = label_kind(token)
    if value is None:
        raise ClassAttributeError(f"class '{column}': unrecognized label {unquote(token)!r}", line)
    return value
