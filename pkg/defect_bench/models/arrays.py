"""Pydantic field types for numpy arrays.

Arrays are copied on validation and frozen (read-only), so models holding
them stay immutable. In JSON they are nested lists; NaN becomes null.
"""

from typing import Annotated, Any

import numpy as np
from pydantic import PlainSerializer, PlainValidator, WithJsonSchema


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _to_float(value: Any) -> np.ndarray:
    return _frozen(np.array(value, dtype=np.float64))


def _to_int(value: Any) -> np.ndarray:
    return _frozen(np.array(value, dtype=np.int64))


def _to_bool(value: Any) -> np.ndarray:
    return _frozen(np.array(value, dtype=bool))


def _dump_float(arr: np.ndarray) -> list:
    if not np.isnan(arr).any():
        return arr.tolist()
    boxed = arr.astype(object)
    boxed[np.isnan(arr)] = None
    return boxed.tolist()


def _dump_plain(arr: np.ndarray) -> list:
    return arr.tolist()


FloatArray = Annotated[
    np.ndarray,
    PlainValidator(_to_float),
    PlainSerializer(_dump_float, return_type=list),
    WithJsonSchema({"type": "array"}),
]

IntArray = Annotated[
    np.ndarray,
    PlainValidator(_to_int),
    PlainSerializer(_dump_plain, return_type=list),
    WithJsonSchema({"type": "array", "items": {"type": "integer"}}),
]

BoolArray = Annotated[
    np.ndarray,
    PlainValidator(_to_bool),
    PlainSerializer(_dump_plain, return_type=list),
    WithJsonSchema({"type": "array", "items": {"type": "boolean"}}),
]
