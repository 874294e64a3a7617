"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateVectorError


def as_float_vector(x, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array; raise ValueError if the shape is wrong."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def check_finite(arr: np.ndarray, name: str = "array") -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_direction(v, name: str = "vector") -> np.ndarray:
    """A vector usable as a direction: 1-D, finite, nonzero norm."""
    arr = as_float_vector(v, name)
    if arr.size == 0:
        raise DegenerateVectorError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DegenerateVectorError(f"{name} contains non-finite values")
    if not np.any(arr):
        raise DegenerateVectorError(f"{name} has zero norm")
    return arr


def check_positive(value, name: str):
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_probability(value: float, name: str) -> float:
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


def format_float(x: float) -> str:
    """17-significant-digit decimal text, lossless for binary64."""
    return format(float(x), ".17g")
