"""Simple imputation baselines and Label Propagation."""
from __future__ import annotations

import warnings

import numpy as np

from .graph import Graph, GraphError, spmm
from .propagation import EmptyChannelWarning, _check_shapes, _prepare, feature_propagate

METHODS = ("zero", "random", "global_mean", "neighbor_mean", "fp", "lp")
LP_ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)


def zero_fill(X, M) -> np.ndarray:
    X, M, vector = _prepare(X, M)
    out = np.where(M, X, 0.0)
    return out[:, 0] if vector else out


def random_fill(X, M, seed=0) -> np.ndarray:
    """Fill unknown entries with standard normal draws.

    Draws come from ``numpy.random.default_rng(seed)`` (PCG64), one per
    unknown entry, assigned in row-major order.
    """
    X, M, vector = _prepare(X, M)
    rng = np.random.default_rng(seed)
    out = X.copy()
    unknown = ~M
    out[unknown] = rng.standard_normal(int(unknown.sum()))
    return out[:, 0] if vector else out


def global_mean_fill(X, M) -> np.ndarray:
    """Fill each channel's unknown entries with the mean of its known ones."""
    X, M, vector = _prepare(X, M)
    counts = M.sum(axis=0)
    sums = np.where(M, X, 0.0).sum(axis=0)
    empty = counts == 0
    if empty.any():
        warnings.warn(
            f"channels {np.flatnonzero(empty).tolist()} have no known entries; "
            "filled with 0",
            EmptyChannelWarning,
            stacklevel=2,
        )
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=~empty)
    out = np.where(M, X, means[None, :])
    return out[:, 0] if vector else out


def neighbor_mean_fill(g: Graph, X, M) -> np.ndarray:
    """Fill an unknown entry with the plain mean of the observed values of the
    same channel over its neighbors, or 0 if no neighbor observes it.

    Single pass: filled values are not reused by other nodes.
    """
    X, M, vector = _prepare(X, M)
    _check_shapes(X, M, g)
    A = g.binary_adjacency
    Mf = M.astype(np.float64)
    sums = A @ np.where(M, X, 0.0)
    counts = A @ Mf
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    out = np.where(M, X, means)
    return out[:, 0] if vector else out


def label_propagation(g: Graph, labels, num_classes=None, alpha=0.9, iterations=50):
    """Class scores from label propagation.

    Iterates ``Y <- alpha * A_norm Y + (1 - alpha) * Y0``, then resets the
    labeled rows to their one-hot rows. ``labels`` uses -1 for unlabeled
    nodes.
    """
    y = np.asarray(labels, dtype=np.int64)
    if y.shape != (g.num_nodes,):
        raise GraphError(f"labels have shape {y.shape}, expected ({g.num_nodes},)")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    labeled = y >= 0
    if not labeled.any():
        raise ValueError("label propagation needs at least one labeled node")
    if num_classes is None:
        num_classes = int(y.max()) + 1
    Y0 = np.zeros((g.num_nodes, num_classes))
    Y0[np.flatnonzero(labeled), y[labeled]] = 1.0
    Y = Y0.copy()
    for _ in range(iterations):
        Y = alpha * spmm(g, Y) + (1.0 - alpha) * Y0
    Y[labeled] = Y0[labeled]
    return Y


def predict(scores) -> np.ndarray:
    """Row-wise argmax; ties go to the smallest class index."""
    return np.argmax(scores, axis=1)


def impute(method: str, g: Graph, X, M, *, seed=0, cfg=None):
    """Dispatch a feature imputation method by CLI name.

    Returns ``(X_filled, trace)``; ``trace`` is None except for ``fp``.
    """
    if method == "zero":
        return zero_fill(X, M), None
    if method == "random":
        return random_fill(X, M, seed=seed), None
    if method == "global_mean":
        return global_mean_fill(X, M), None
    if method == "neighbor_mean":
        return neighbor_mean_fill(g, X, M), None
    if method == "fp":
        return feature_propagate(g, X, M, cfg)
    if method == "lp":
        raise ValueError("lp predicts labels and does not impute features")
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
