"""Input validation helpers used by the functional core and the estimators."""

from __future__ import annotations

import numpy as np

from .errors import DataError


def as_float_vector(values, name: str = "values") -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting anything else."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def as_float_matrix(values, name: str = "X", min_rows: int = 1) -> np.ndarray:
    """Coerce to a 2-D float64 array with at least ``min_rows`` rows."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise DataError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise DataError(f"{name} needs at least {min_rows} rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def check_unit_interval(arr: np.ndarray, name: str = "values") -> np.ndarray:
    """Require every entry to lie in [0, 1]."""
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DataError(f"{name} must lie in [0, 1]")
    return arr


def check_equal_length(a, b, what: str = "columns") -> None:
    if len(a) != len(b):
        raise DataError(f"{what} have unequal lengths ({len(a)} vs {len(b)})")


def as_symmetric_matrix(matrix, name: str = "matrix") -> np.ndarray:
    """Validate a square symmetric matrix, repairing rounding-level asymmetry.

    Entries within 1e-12 of their transpose are mirrored from the upper
    triangle so downstream code sees exact symmetry; larger mismatches are
    rejected.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    scale = np.abs(arr).max() if arr.size else 0.0
    if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12 * (scale + 1.0)):
        raise DataError(f"{name} is not symmetric")
    upper = np.triu(arr)
    return upper + np.triu(arr, k=1).T


def feature_names_of(X, n_features: int) -> tuple[str, ...]:
    """Column names from a dataframe-like ``X``, else generated x0..x{p-1}."""
    cols = getattr(X, "columns", None)
    if cols is not None and len(cols) == n_features:
        return tuple(str(c) for c in cols)
    return tuple(f"x{i}" for i in range(n_features))
