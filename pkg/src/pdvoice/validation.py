"""Small input-validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np


def check_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_binary_labels(y, n_rows: int) -> np.ndarray:
    """Coerce to a {0,1} int vector matching the row count."""
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != n_rows:
        raise ValueError(f"y must be 1-D with {n_rows} entries, got shape {y.shape}")
    values = np.unique(y)
    if not np.all(np.isin(values, (0, 1))):
        raise ValueError(f"labels must be 0 or 1, got values {values.tolist()}")
    return y.astype(np.int64)


def check_n_features(X: np.ndarray, expected: int) -> np.ndarray:
    if X.shape[1] != expected:
        raise ValueError(f"expected {expected} features, got {X.shape[1]}")
    return X
