"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .errors import DomainError, EmptyInputError, InsufficientSampleError


def check_points(X, name: str = "X") -> np.ndarray:
    """Return ``X`` as a finite float array of shape ``(n, 2)``."""
    X = check_array(X, dtype=np.float64, ensure_all_finite=True, input_name=name)
    if X.shape[1] != 2:
        raise ValueError(f"{name} must have 2 columns (x, y), got {X.shape[1]}")
    return X


def check_areas(areas, min_samples: int = 1, positive: bool = True) -> np.ndarray:
    """1-D finite float array of building areas."""
    a = np.asarray(areas, dtype=np.float64).ravel()
    if a.size == 0:
        raise EmptyInputError("no area values given")
    if a.size < min_samples:
        raise InsufficientSampleError(f"need at least {min_samples} samples, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise DomainError("areas must be finite")
    if positive and np.any(a <= 0):
        raise DomainError("areas must be strictly positive")
    return a


def check_fraction(value: float, name: str, low_open: bool = True) -> float:
    v = float(value)
    ok = (0.0 < v <= 1.0) if low_open else (0.0 <= v <= 1.0)
    if not ok:
        bound = "(0, 1]" if low_open else "[0, 1]"
        raise ValueError(f"{name} must be in {bound}, got {value}")
    return v
