import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from featprop.graph import GraphError, build_graph, connected_components, spmm

from conftest import SQRT_HALF, dense_normalized_adjacency, random_connected_graph


def test_triangle_weights(triangle):
    assert triangle.num_edges == 3
    assert len(triangle.norm_weights) == 6
    np.testing.assert_array_equal(triangle.norm_weights, 0.5)


def test_path_weights(p3):
    A = p3.dense_adjacency()
    assert A[0, 1] == pytest.approx(0.7071067, abs=1e-7)
    assert A[1, 2] == pytest.approx(0.7071067, abs=1e-7)
    assert A[0, 2] == 0.0


def test_dedup_and_self_loop_dropped():
    g = build_graph([(0, 1), (1, 0), (0, 0)], 2)
    assert g.num_edges == 1
    np.testing.assert_array_equal(g.col_indices, [1, 0])
    np.testing.assert_array_equal(g.norm_weights, [1.0, 1.0])
    np.testing.assert_array_equal(g.degrees, [1.0, 1.0])


def test_out_of_range_edge_names_offender():
    with pytest.raises(GraphError, match=r"\(2, 5\)"):
        build_graph([(0, 1), (2, 5)], 4)
    with pytest.raises(GraphError):
        build_graph([(-1, 0)], 2)


def test_isolated_nodes_have_empty_rows():
    g = build_graph([(0, 1)], 4)
    np.testing.assert_array_equal(g.degrees, [1, 1, 0, 0])
    np.testing.assert_array_equal(np.diff(g.row_offsets), [1, 1, 0, 0])
    out = spmm(g, np.ones((4, 2)))
    np.testing.assert_array_equal(out[2:], 0.0)
    assert np.isfinite(g.norm_weights).all()


def test_csr_layout_sorted_and_symmetric(rng):
    edges = rng.integers(0, 30, size=(120, 2))
    g = build_graph(edges, 30)
    for i in range(30):
        row = g.col_indices[g.row_offsets[i]:g.row_offsets[i + 1]]
        assert np.all(np.diff(row) > 0)
    A = g.dense_adjacency()
    np.testing.assert_array_equal(A, A.T)
    np.testing.assert_allclose(A, dense_normalized_adjacency(edges, 30), rtol=0, atol=1e-15)


def test_spmm_examples(triangle, p3):
    np.testing.assert_allclose(spmm(triangle, np.ones((3, 1))), np.ones((3, 1)), atol=1e-15)
    np.testing.assert_allclose(
        spmm(p3, np.ones(3)), [SQRT_HALF, 2 * SQRT_HALF, SQRT_HALF], atol=1e-12
    )
    np.testing.assert_array_equal(spmm(p3, np.zeros((3, 4))), 0.0)


def test_spmm_dimension_mismatch(p3):
    with pytest.raises(GraphError):
        spmm(p3, np.ones((4, 2)))


def test_spmm_matches_dense_oracle(rng):
    edges = rng.integers(0, 40, size=(150, 2))
    g = build_graph(edges, 40)
    X = rng.standard_normal((40, 5))
    np.testing.assert_allclose(spmm(g, X), dense_normalized_adjacency(edges, 40) @ X, atol=1e-12)


def test_spmm_is_linear_and_symmetric(rng):
    g = random_connected_graph(rng, 50)
    X, Y = rng.standard_normal((2, 50, 3))
    a, b = 1.7, -0.3
    np.testing.assert_allclose(spmm(g, a * X + b * Y), a * spmm(g, X) + b * spmm(g, Y), atol=1e-12)
    np.testing.assert_allclose(X.T @ spmm(g, Y), (Y.T @ spmm(g, X)).T, atol=1e-12)


def test_laplacian_psd_on_random_vectors(rng):
    g = random_connected_graph(rng, 60)
    for _ in range(50):
        x = rng.standard_normal(60)
        assert x @ x - x @ spmm(g, x) >= -1e-12


def test_spmm_is_deterministic(rng):
    g = random_connected_graph(rng, 80)
    X = rng.standard_normal((80, 7))
    assert np.array_equal(spmm(g, X), spmm(g, X))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 25),
    pairs=st.lists(st.tuples(st.integers(0, 24), st.integers(0, 24)), max_size=80),
)
def test_round_trip_is_bit_exact(n, pairs):
    edges = [(i % n, j % n) for i, j in pairs]
    g = build_graph(edges, n)
    h = build_graph(g.edge_list(), n)
    assert np.array_equal(g.row_offsets, h.row_offsets)
    assert np.array_equal(g.col_indices, h.col_indices)
    assert np.array_equal(g.norm_weights, h.norm_weights)
    assert np.array_equal(g.degrees, h.degrees)


def test_components_examples():
    two = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 6)
    lab = connected_components(two)
    assert lab.num_components == 2
    np.testing.assert_array_equal(lab.component_id, [0, 0, 0, 1, 1, 1])

    path = build_graph([(i, i + 1) for i in range(4)], 5)
    assert connected_components(path).num_components == 1

    empty = build_graph([], 3)
    lab = connected_components(empty)
    assert lab.num_components == 3
    np.testing.assert_array_equal(lab.component_id, [0, 1, 2])


def _reachable(g, src):
    seen, stack = {src}, [src]
    while stack:
        i = stack.pop()
        for j in g.col_indices[g.row_offsets[i]:g.row_offsets[i + 1]]:
            if j not in seen:
                seen.add(int(j))
                stack.append(int(j))
    return seen


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 20),
    pairs=st.lists(st.tuples(st.integers(0, 19), st.integers(0, 19)), max_size=25),
)
def test_components_match_traversal(n, pairs):
    g = build_graph([(i % n, j % n) for i, j in pairs], n)
    lab = connected_components(g)
    ids = lab.component_id
    assert sorted(set(ids.tolist())) == list(range(lab.num_components))
    for i in range(n):
        reach = _reachable(g, i)
        for j in range(n):
            assert (ids[i] == ids[j]) == (j in reach)
