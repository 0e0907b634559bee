"""Input validation helpers shared by the dataset, forest, and estimator layers."""

import numpy as np


def check_feature_matrix(X, n_features=None, name="X"):
    """Coerce ``X`` to a finite 2-D float64 array, optionally checking its width."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got {X.ndim} dimension(s)")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinite values")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"{name} has {X.shape[1]} features, expected {n_features}")
    return X


def check_feature_vector(x, n_features, name="x"):
    """Coerce ``x`` to a finite 1-D float64 array of length ``n_features``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got {x.ndim} dimension(s)")
    if x.shape[0] != n_features:
        raise ValueError(f"{name} has {x.shape[0]} features, expected {n_features}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return x


def check_labels(labels, n_rows, class_count, name="labels"):
    """Coerce ``labels`` to int64 class indices in ``[0, class_count)``."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got {labels.ndim} dimension(s)")
    if labels.shape[0] != n_rows:
        raise ValueError(f"{name} has {labels.shape[0]} entries, expected {n_rows}")
    if not np.issubdtype(labels.dtype, np.integer):
        as_int = labels.astype(np.int64, copy=True)
        if not np.array_equal(as_int, labels):
            raise ValueError(f"{name} must contain integer class indices")
        labels = as_int
    else:
        labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= class_count):
        raise ValueError(f"{name} must lie in [0, {class_count}), got range "
                         f"[{labels.min()}, {labels.max()}]")
    return labels


def check_distribution(probs, name="distribution"):
    """Coerce ``probs`` to a 1-D float64 probability vector summing to 1."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise ValueError(f"{name} must contain finite non-negative entries")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must sum to 1, got {probs.sum()!r}")
    return probs
