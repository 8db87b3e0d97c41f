"""Input validation helpers shared by the estimators and the CLI."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DomainError

__all__ = ["check_xi", "check_grid", "check_positive_int"]


def check_xi(X):
    """Coordinates as a finite 1-D float array.

    Accepts a scalar, a 1-D array or a single-column 2-D array (the
    scikit-learn ``(n_samples, 1)`` layout).
    """
    try:
        arr = check_array(np.atleast_1d(np.asarray(X, dtype=float)), ensure_2d=False,
                          dtype=float, ensure_all_finite=True, input_name="xi")
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DomainError(f"expected one coordinate column, got shape {arr.shape}")
        arr = arr[:, 0]
    return arr


def check_grid(values, name="grid", ascending=True):
    """Non-empty finite 1-D grid, strictly ascending if requested."""
    g = np.asarray(values, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(g)):
        raise DomainError(f"{name} must be finite")
    if ascending and np.any(np.diff(g) <= 0):
        raise DomainError(f"{name} must be strictly ascending")
    return g


def check_positive_int(value, name, low=1, high=None):
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < low or (high is not None and value > high):
        bound = f"[{low}, {high}]" if high is not None else f">= {low}"
        raise DomainError(f"{name} must be in {bound}, got {value}")
    return value
