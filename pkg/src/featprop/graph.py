"""Undirected graphs in CSR form with symmetric-normalized weights.

The normalized adjacency ``D^{-1/2} A D^{-1/2}`` is stored explicitly; the
Laplacian ``I - A_norm`` is never materialized on the sparse path.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc


class GraphError(ValueError):
    """Raised for malformed graph input (bad indices, bad shapes)."""


@dataclass(frozen=True, eq=False)
class Graph:
    num_nodes: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    norm_weights: np.ndarray
    degrees: np.ndarray

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return len(self.col_indices) // 2

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Normalized adjacency as a scipy CSR matrix (shares the arrays)."""
        n = self.num_nodes
        return sp.csr_matrix(
            (self.norm_weights, self.col_indices, self.row_offsets), shape=(n, n)
        )

    @cached_property
    def binary_adjacency(self) -> sp.csr_matrix:
        n = self.num_nodes
        ones = np.ones(len(self.col_indices))
        return sp.csr_matrix((ones, self.col_indices, self.row_offsets), shape=(n, n))

    def edge_list(self) -> np.ndarray:
        """Each undirected edge once as an ``(m, 2)`` array with ``i < j``."""
        rows = np.repeat(np.arange(self.num_nodes), np.diff(self.row_offsets))
        keep = rows < self.col_indices
        return np.column_stack([rows[keep], self.col_indices[keep]])

    def dense_adjacency(self) -> np.ndarray:
        return self.adjacency.toarray()

    def dense_laplacian(self) -> np.ndarray:
        return np.eye(self.num_nodes) - self.dense_adjacency()


@dataclass(frozen=True)
class ComponentLabeling:
    component_id: np.ndarray
    num_components: int

    def sizes(self) -> np.ndarray:
        return np.bincount(self.component_id, minlength=self.num_components)


def build_graph(edges, num_nodes: int) -> Graph:
    """Build a normalized CSR graph from an edge list.

    Edges may be given in one direction only, repeated, or include
    self-loops. Self-loops are dropped, duplicates collapse, and the result
    is symmetric. Isolated nodes keep degree 0 and an empty row.
    """
    num_nodes = int(num_nodes)
    if num_nodes < 0:
        raise GraphError(f"num_nodes must be non-negative, got {num_nodes}")
    e = np.asarray(edges, dtype=np.int64)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise GraphError(f"edges must have shape (m, 2), got {e.shape}")
    bad = np.flatnonzero((e < 0).any(axis=1) | (e >= num_nodes).any(axis=1))
    if len(bad):
        i, j = e[bad[0]]
        raise GraphError(
            f"edge #{bad[0]} ({i}, {j}) out of range for num_nodes={num_nodes}"
        )

    e = e[e[:, 0] != e[:, 1]]
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    # sorted unique keys give row-major order with ascending columns
    keys = np.unique(src * num_nodes + dst)
    rows = keys // num_nodes
    cols = keys % num_nodes

    counts = np.bincount(rows, minlength=num_nodes)
    row_offsets = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    degrees = counts.astype(np.float64)
    # every stored pair has both degrees >= 1
    weights = 1.0 / np.sqrt(degrees[rows] * degrees[cols])

    return Graph(
        num_nodes=num_nodes,
        row_offsets=row_offsets,
        col_indices=cols.astype(np.int64),
        norm_weights=weights,
        degrees=degrees,
    )


def spmm(g: Graph, X: np.ndarray) -> np.ndarray:
    """Multiply the normalized adjacency by a dense ``n x d`` matrix.

    Accepts a 1-D vector as a single channel and returns the same rank.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != g.num_nodes:
        raise GraphError(
            f"feature matrix has {X.shape[0]} rows, graph has {g.num_nodes} nodes"
        )
    return g.adjacency @ X


def connected_components(g: Graph) -> ComponentLabeling:
    """Label connected components; ids follow the order of each component's
    smallest node index."""
    if g.num_nodes == 0:
        return ComponentLabeling(np.zeros(0, dtype=np.int64), 0)
    k, raw = _cc(g.binary_adjacency, directed=False)
    # relabel so the component containing node 0 is 0, and so on
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    return ComponentLabeling(remap[raw], int(k))


def is_connected(g: Graph) -> bool:
    return connected_components(g).num_components <= 1
