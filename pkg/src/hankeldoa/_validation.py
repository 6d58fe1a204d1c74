"""Input checks for the estimator wrappers.

scikit-learn's ``check_array`` refuses complex input, so snapshots are
validated here. Missing elements are encoded as NaN (in either part).
"""
import numpy as np

from .exceptions import DimensionError


def check_snapshots(X, *, allow_missing=True, min_elements=3):
    """Return ``X`` as a 2-D complex array of shape ``(n_snapshots, n)``.

    A 1-D input is treated as a single snapshot.
    """
    try:
        X = np.array(X, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"snapshots must be numeric: {exc}") from exc
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionError(f"expected a 1-D or 2-D array, got {X.ndim}-D")
    if X.shape[0] == 0:
        raise DimensionError("no snapshots given")
    if X.shape[1] < min_elements:
        raise DimensionError(f"need at least {min_elements} elements, got {X.shape[1]}")
    if np.any(np.isinf(X)):
        raise DimensionError("snapshots contain inf")
    missing = missing_mask(X)
    if missing.any() and not allow_missing:
        raise DimensionError("snapshots contain missing (NaN) elements")
    if missing.all(axis=1).any():
        raise DimensionError("a snapshot has no observed elements")
    return X


def missing_mask(X) -> np.ndarray:
    return np.isnan(X.real) | np.isnan(X.imag)


def check_n_elements(estimator, X):
    n = getattr(estimator, "n_features_in_", None)
    if n is not None and X.shape[1] != n:
        raise DimensionError(f"{type(estimator).__name__} was fitted with {n} elements, "
                             f"got {X.shape[1]}")
