import sys

import numpy as np
import pytest

from featprop.graph import build_graph, is_connected

SQRT_HALF = 1.0 / np.sqrt(2.0)


def dense_normalized_adjacency(edges, n):
    """Reference D^-1/2 A D^-1/2 built entrywise, independent of the CSR path."""
    A = np.zeros((n, n))
    for i, j in edges:
        if i != j:
            A[i, j] = A[j, i] = 1.0
    d = A.sum(axis=1)
    out = np.zeros_like(A)
    for i in range(n):
        for j in range(n):
            if A[i, j]:
                out[i, j] = 1.0 / np.sqrt(d[i] * d[j])
    return out


def random_connected_graph(rng, n, p=None):
    """Erdos-Renyi G(n, p), resampled until connected."""
    if p is None:
        p = min(1.0, 2.5 * np.log(max(n, 2)) / n)
    while True:
        iu = np.triu_indices(n, 1)
        hit = rng.random(len(iu[0])) < p
        edges = np.column_stack([iu[0][hit], iu[1][hit]])
        g = build_graph(edges, n)
        if is_connected(g):
            return g


def random_proper_mask(rng, n, d, frac):
    """Known mask with the given known fraction; every channel has at least
    one known and one unknown node."""
    M = rng.random((n, d)) < frac
    for c in range(d):
        if not M[:, c].any():
            M[rng.integers(n), c] = True
        if M[:, c].all():
            M[rng.integers(n), c] = False
    return M


@pytest.fixture
def triangle():
    return build_graph([(0, 1), (1, 2), (0, 2)], 3)


@pytest.fixture
def p3():
    return build_graph([(0, 1), (1, 2)], 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
