"""Dense reference solvers: harmonic interpolation in closed form, the
spectral radius of the unknown-unknown block, and Laplacian eigenbases.

Everything here materializes ``n x n`` matrices and is meant for graphs of
at most a few thousand nodes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graph import Graph, GraphError, connected_components
from .propagation import EmptyChannelWarning, _prepare

POWER_MAX_ITER = 1000
POWER_TOL = 1e-10
POWER_SEED = 0
DENSE_RADIUS_LIMIT = 500


class SingularSystemError(np.linalg.LinAlgError):
    pass


class SpectralRadiusWarning(UserWarning):
    """The unknown set covers an entire component, so the radius may be 1."""


@dataclass(frozen=True)
class SpectralBasis:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _channel_groups(M: np.ndarray):
    """Group channel indices that share the same known pattern."""
    groups = {}
    for c in range(M.shape[1]):
        groups.setdefault(M[:, c].tobytes(), []).append(c)
    return list(groups.values())


def _solvable_unknowns(labels, known: np.ndarray):
    """Split unknown nodes into those reachable from a known node (within
    their component) and orphans."""
    comp = labels.component_id
    has_known = np.zeros(labels.num_components, dtype=bool)
    has_known[comp[known]] = True
    unknown = np.flatnonzero(~known)
    reachable = has_known[comp[unknown]]
    return unknown[reachable], unknown[~reachable]


def _harmonic(g: Graph, X, M, system):
    X, M, vector = _prepare(X, M)
    if X.shape[0] != g.num_nodes:
        raise GraphError(
            f"feature matrix has {X.shape[0]} rows, graph has {g.num_nodes} nodes"
        )
    A = g.dense_adjacency()
    labels = connected_components(g)
    out = np.where(M, X, 0.0)
    n_orphans = 0
    for chans in _channel_groups(M):
        known = M[:, chans[0]]
        u, orphans = _solvable_unknowns(labels, known)
        n_orphans += len(orphans) * len(chans)
        if len(u) == 0:
            continue
        k = np.flatnonzero(known)
        lhs, rhs = system(A, u, k, X[np.ix_(k, chans)])
        try:
            sol = scipy.linalg.solve(lhs, rhs, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
            raise SingularSystemError(
                f"sub-Laplacian on {len(u)} unknown nodes is singular"
            ) from exc
        if not np.all(np.isfinite(sol)):
            raise SingularSystemError("non-finite solution of harmonic system")
        out[np.ix_(u, chans)] = sol
    if n_orphans:
        warnings.warn(
            f"{n_orphans} unknown entries have no known entry in their "
            "component; returned as 0",
            EmptyChannelWarning,
            stacklevel=3,
        )
    return out[:, 0] if vector else out


def _laplacian_system(A, u, k, Xk):
    # Delta_uu x_u = -Delta_uk x_k, with Delta = I - A
    L = np.eye(A.shape[0]) - A
    return L[np.ix_(u, u)], -L[np.ix_(u, k)] @ Xk


def _propagation_system(A, u, k, Xk):
    # (I_u - A_uu) x_u = A_uk x_k
    return np.eye(len(u)) - A[np.ix_(u, u)], A[np.ix_(u, k)] @ Xk


def closed_form_solve(g: Graph, X, M) -> np.ndarray:
    """Exact minimizer of the Dirichlet energy with known entries fixed.

    Solves ``Delta_uu x_u = -Delta_uk x_k`` per channel with a dense
    factorization; channels with identical masks share one solve. Unknown
    entries in components with no known node are set to 0 and an
    :class:`EmptyChannelWarning` is issued.
    """
    return _harmonic(g, X, M, _laplacian_system)


def steady_state(g: Graph, X, M) -> np.ndarray:
    """Limit of the propagation recursion, ``(I - A_uu)^{-1} A_uk X_k``.

    Algebraically identical to :func:`closed_form_solve` but assembled from
    the normalized adjacency rather than the Laplacian.
    """
    return _harmonic(g, X, M, _propagation_system)


def _power_radius(B: np.ndarray) -> float:
    """Spectral radius of a symmetric matrix via power iteration on ``B @ B``."""
    rng = np.random.default_rng(POWER_SEED)
    v = rng.standard_normal(B.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(POWER_MAX_ITER):
        w = B @ (B @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        lam_new = float(v @ w)
        v = w / norm
        if abs(lam_new - lam) <= POWER_TOL * max(lam_new, 1.0):
            lam = lam_new
            break
        lam = lam_new
    return float(np.sqrt(max(lam, 0.0)))


def spectral_radius_submatrix(g: Graph, unknown_nodes, method: str = "auto") -> float:
    """Spectral radius of the normalized adjacency restricted to
    ``unknown_nodes``.

    Below 1 whenever no component lies entirely inside the unknown set. If
    one does, a :class:`SpectralRadiusWarning` is issued and the result may
    equal 1.

    ``method`` is ``"dense"`` (symmetric eigensolve), ``"power"`` or
    ``"auto"`` (dense up to 500 nodes).
    """
    u = np.unique(np.asarray(list(unknown_nodes), dtype=np.int64))
    if len(u) == 0:
        return 0.0
    if u[0] < 0 or u[-1] >= g.num_nodes:
        raise GraphError("unknown node index out of range")
    labels = connected_components(g)
    sizes = labels.sizes()
    inside = np.bincount(labels.component_id[u], minlength=labels.num_components)
    full = np.flatnonzero((inside == sizes) & (sizes > 1))
    if len(full):
        warnings.warn(
            f"unknown set contains all of component(s) {full.tolist()}",
            SpectralRadiusWarning,
            stacklevel=2,
        )
    B = g.adjacency[u][:, u].toarray()
    if method == "auto":
        method = "dense" if len(u) <= DENSE_RADIUS_LIMIT else "power"
    if method == "dense":
        return float(np.abs(np.linalg.eigvalsh(B)).max())
    if method == "power":
        return _power_radius(B)
    raise ValueError(f"unknown method {method!r}")


def _fix_signs(U: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Flip columns so the first entry above ``atol`` in magnitude is positive."""
    lead = np.argmax(np.abs(U) > atol, axis=0)
    signs = np.sign(U[lead, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def laplacian_eigendecomposition(g: Graph) -> SpectralBasis:
    """Full eigendecomposition of ``I - A_norm``, eigenvalues ascending."""
    try:
        lam, U = scipy.linalg.eigh(g.dense_laplacian())
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigendecomposition of {g.num_nodes}-node Laplacian failed: {exc}"
        ) from exc
    # eigh already returns ascending eigenvalues; clip rounding noise
    lam = np.clip(lam, 0.0, 2.0)
    return SpectralBasis(lam, _fix_signs(U))


def graph_fourier_transform(basis: SpectralBasis, X) -> np.ndarray:
    """Coefficients ``U^T X`` ordered by ascending eigenvalue."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != basis.eigenvectors.shape[0]:
        raise ValueError(
            f"feature matrix has {X.shape[0]} rows, basis has "
            f"{basis.eigenvectors.shape[0]}"
        )
    return basis.eigenvectors.T @ X
