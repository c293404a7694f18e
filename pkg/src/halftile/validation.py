"""Input validation helpers for the estimator and CLI surfaces."""

from __future__ import annotations

import numpy as np

from .errors import BadConfigError, BadLengthError
from .half import HALF


def as_half_vector(x) -> np.ndarray:
    """Coerce to a non-empty, contiguous 1-D binary16 array."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise BadLengthError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise BadLengthError("input vector is empty")
    if not np.issubdtype(arr.dtype, np.number):
        raise BadLengthError(f"input must be numeric, got dtype {arr.dtype}")
    return np.ascontiguousarray(arr, dtype=HALF)


def as_half_batch(X) -> tuple[np.ndarray, bool]:
    """Coerce to a 2-D binary16 batch; returns (batch, input_was_1d)."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        return as_half_vector(arr).reshape(1, -1), True
    if arr.ndim != 2:
        raise BadLengthError(f"expected a 1-D or 2-D array, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise BadLengthError(f"input batch is empty: shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.number):
        raise BadLengthError(f"input must be numeric, got dtype {arr.dtype}")
    return np.ascontiguousarray(arr, dtype=HALF), False


def check_positive(name: str, value: int) -> int:
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise BadConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
