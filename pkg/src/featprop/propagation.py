"""Feature Propagation: diffusion of known features with reset boundary values.

Each iteration multiplies the feature matrix by the normalized adjacency
and writes the observed entries back. With step size ``h`` the update is the
explicit Euler discretization of the heat equation on the unknown entries,
``x_u <- (1 - h) x_u + h (A_norm x)_u``; ``h = 1`` recovers plain FP.

Any ``h`` in (0, 1] converges. Larger steps converge only while
``h < 2 / lambda_max(Delta_uu)``, which fails on near-bipartite graphs.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .energy import dirichlet_energy
from .graph import Graph, GraphError, connected_components, spmm

INIT_MODES = ("zeros", "global_mean", "keep_input")


class EmptyChannelWarning(UserWarning):
    """A channel (or a channel within a component) has no observed entries."""


@dataclass(frozen=True)
class PropagationConfig:
    max_iterations: int = 40
    step_size: float = 1.0
    tolerance: float = 1e-6
    init_mode: str = "zeros"
    record_energy: bool = False

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if not 0.0 < self.step_size < 2.0:
            raise ValueError(f"step_size must lie in (0, 2), got {self.step_size}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")
        if self.init_mode not in INIT_MODES:
            raise ValueError(
                f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}"
            )


@dataclass
class ConvergenceTrace:
    residuals: list = field(default_factory=list)
    energies: np.ndarray | None = None
    iterations: int = 0
    converged: bool = False

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else 0.0


def _check_shapes(X: np.ndarray, M: np.ndarray, g: Graph | None = None):
    if X.shape != M.shape:
        raise GraphError(f"mask shape {M.shape} does not match features {X.shape}")
    if g is not None and X.shape[0] != g.num_nodes:
        raise GraphError(
            f"feature matrix has {X.shape[0]} rows, graph has {g.num_nodes} nodes"
        )


def _prepare(X, M):
    X = np.array(X, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    vector = X.ndim == 1
    if vector:
        X, M = X[:, None], M[:, None]
    _check_shapes(X, M)
    return X, M, vector


def initialize_unknown(X, M, mode: str = "zeros") -> np.ndarray:
    """Fill unknown entries before diffusion.

    ``zeros`` sets them to 0, ``global_mean`` to the mean of the observed
    entries of the same channel (0 if the channel has none, with an
    :class:`EmptyChannelWarning`), ``keep_input`` leaves them as given.
    """
    X, M, vector = _prepare(X, M)
    if mode == "zeros":
        X[~M] = 0.0
    elif mode == "global_mean":
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
        X = np.where(M, X, means[None, :])
    elif mode != "keep_input":
        raise ValueError(f"unknown init mode {mode!r}")
    return X[:, 0] if vector else X


def fp_step(g: Graph, X, M, originals) -> np.ndarray:
    """One propagation step followed by resetting the known entries."""
    X = np.asarray(X, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    _check_shapes(X, M, g)
    return np.where(M, originals, spmm(g, X))


def euler_step(g: Graph, X, M, originals, h: float) -> np.ndarray:
    """Explicit Euler step of size ``h`` on the unknown entries."""
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h}")
    if h == 1.0:
        return fp_step(g, X, M, originals)
    X = np.asarray(X, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    _check_shapes(X, M, g)
    return np.where(M, originals, (1.0 - h) * X + h * spmm(g, X))


def orphan_entries(g: Graph, M) -> np.ndarray:
    """Unknown entries whose connected component has no known entry in the
    same channel. Diffusion cannot reach them."""
    M = np.asarray(M, dtype=bool)
    labels = connected_components(g)
    n, k = g.num_nodes, labels.num_components
    member = sp.csr_matrix(
        (np.ones(n), (labels.component_id, np.arange(n))), shape=(k, n)
    )
    known_per_comp = member @ M.astype(np.float64)
    return (known_per_comp[labels.component_id] == 0) & ~M


def feature_propagate(g: Graph, X, M, cfg: PropagationConfig | None = None):
    """Reconstruct unknown features by iterated diffusion.

    Parameters
    ----------
    g : Graph
    X : array, shape (n, d) or (n,)
        Features; only entries with ``M`` true are read unless
        ``cfg.init_mode == "keep_input"``.
    M : bool array, same shape as X
        True where the feature value is observed.
    cfg : PropagationConfig, optional

    Returns
    -------
    X_out : ndarray
        Reconstructed features. Observed entries are bit-identical to ``X``.
    trace : ConvergenceTrace
    """
    cfg = cfg or PropagationConfig()
    X0, M, vector = _prepare(X, M)
    _check_shapes(X0, M, g)
    cur = initialize_unknown(X0, M, cfg.init_mode)

    # entries with no known value in their component stay at their init value
    orphans = orphan_entries(g, M)
    frozen = M | orphans
    anchor = np.where(M, X0, cur)
    if orphans.any():
        warnings.warn(
            f"{int(orphans.sum())} unknown entries lie in components with no "
            "known value in their channel; left at initialization",
            EmptyChannelWarning,
            stacklevel=2,
        )

    h = cfg.step_size
    trace = ConvergenceTrace()
    energies = [dirichlet_energy(g, cur)] if cfg.record_energy else None
    cur_norm = np.linalg.norm(cur)
    for it in range(cfg.max_iterations):
        AX = spmm(g, cur)
        if h == 1.0:
            nxt = np.where(frozen, anchor, AX)
        else:
            nxt = np.where(frozen, anchor, (1.0 - h) * cur + h * AX)
        nxt_norm = np.linalg.norm(nxt)
        change = np.linalg.norm(nxt - cur) / max(cur_norm, np.finfo(float).tiny)
        if not np.isfinite(nxt_norm):
            raise FloatingPointError(
                f"propagation diverged at iteration {it + 1} with step size {h}; "
                "use a step size <= 1"
            )
        trace.residuals.append(float(change))
        cur, cur_norm = nxt, nxt_norm
        trace.iterations = it + 1
        if energies is not None:
            energies.append(dirichlet_energy(g, cur))
        if change < cfg.tolerance:
            trace.converged = True
            break

    if energies is not None:
        trace.energies = np.vstack(energies)
    return (cur[:, 0] if vector else cur), trace
