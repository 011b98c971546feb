import numpy as np
import pytest

from featprop.baselines import (
    global_mean_fill,
    impute,
    label_propagation,
    neighbor_mean_fill,
    predict,
    random_fill,
    zero_fill,
)
from featprop.graph import build_graph
from featprop.propagation import EmptyChannelWarning, fp_step

from conftest import random_connected_graph

T, F = True, False


def test_zero_fill():
    np.testing.assert_array_equal(zero_fill([[1.0], [np.nan]], [[T], [F]]), [[1.0], [0.0]])
    X = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(zero_fill(X, np.ones((2, 2), bool)), X)
    np.testing.assert_array_equal(zero_fill(X, np.zeros((2, 2), bool)), 0.0)


def test_random_fill_deterministic_and_keeps_known(rng):
    X = rng.standard_normal((20, 3))
    M = rng.random((20, 3)) < 0.5
    a, b = random_fill(X, M, seed=7), random_fill(X, M, seed=7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, random_fill(X, M, seed=8))
    assert np.array_equal(a[M], X[M])
    np.testing.assert_array_equal(random_fill(X, np.ones((20, 3), bool), seed=1), X)


def test_random_fill_row_major_order():
    X = np.zeros((2, 2))
    M = np.array([[T, F], [F, F]])
    draws = np.random.default_rng(3).standard_normal(3)
    out = random_fill(X, M, seed=3)
    np.testing.assert_array_equal([out[0, 1], out[1, 0], out[1, 1]], draws)


def test_random_fill_mean_near_zero():
    X = np.zeros((1000, 1000))
    out = random_fill(X, np.zeros_like(X, dtype=bool), seed=0)
    assert -0.01 <= out.mean() <= 0.01


def test_global_mean_fill():
    out = global_mean_fill([[5.0], [0.0], [7.0]], [[T], [F], [T]])
    np.testing.assert_array_equal(out, [[5.0], [6.0], [7.0]])
    out = global_mean_fill([[4.0], [0.0], [0.0]], [[T], [F], [F]])
    np.testing.assert_array_equal(out, [[4.0], [4.0], [4.0]])
    with pytest.warns(EmptyChannelWarning):
        out = global_mean_fill([[4.0], [1.0]], [[F], [F]])
    np.testing.assert_array_equal(out, 0.0)


def test_neighbor_mean_examples(p3):
    star = build_graph([(0, 1), (0, 2), (0, 3)], 4)
    out = neighbor_mean_fill(star, [0.0, 1.0, 3.0, 9.0], [F, T, T, F])
    assert out[0] == 2.0
    assert out[3] == 0.0  # its only neighbor is unobserved

    out = neighbor_mean_fill(p3, [0.0, 0.0, 1.0], [T, F, T])
    assert out[1] == 0.5


def test_neighbor_mean_uses_only_observed_same_channel(rng):
    g = random_connected_graph(rng, 30)
    X = rng.standard_normal((30, 3))
    M = rng.random((30, 3)) < 0.5
    out = neighbor_mean_fill(g, X, M)
    A = g.binary_adjacency.toarray()
    for i in range(30):
        for c in range(3):
            if M[i, c]:
                assert out[i, c] == X[i, c]
                continue
            nb = np.flatnonzero((A[i] > 0) & M[:, c])
            expect = X[nb, c].mean() if len(nb) else 0.0
            assert out[i, c] == pytest.approx(expect, abs=1e-12)


def test_neighbor_mean_and_fp_step_stay_in_hull(rng):
    g = random_connected_graph(rng, 40)
    X = rng.uniform(1.0, 2.0, size=(40, 2))
    M = rng.random((40, 2)) < 0.5
    X0 = np.where(M, X, 0.0)
    nm = neighbor_mean_fill(g, X, M)
    assert np.array_equal(nm[M], X[M])
    A = g.binary_adjacency.toarray()
    for i, c in zip(*np.nonzero(~M)):
        vals = np.append(X[(A[i] > 0) & M[:, c], c], 0.0)
        assert vals.min() - 1e-12 <= nm[i, c] <= vals.max() + 1e-12
    step = fp_step(g, X0, M, X)
    assert np.array_equal(step[M], X[M])


@pytest.mark.parametrize("method", ["zero", "random", "global_mean", "neighbor_mean", "fp"])
def test_all_fills_preserve_known_bitwise(method, rng):
    g = random_connected_graph(rng, 30)
    X = rng.standard_normal((30, 4)) * 1e6
    M = rng.random((30, 4)) < 0.4
    M[0] = True
    out, _ = impute(method, g, X, M, seed=1)
    assert np.array_equal(out[M], X[M])


def test_impute_rejects_lp_and_unknown(p3):
    with pytest.raises(ValueError):
        impute("lp", p3, np.zeros(3), np.ones(3, bool))
    with pytest.raises(ValueError):
        impute("mice", p3, np.zeros(3), np.ones(3, bool))


class TestLabelPropagation:
    def test_alpha_zero_is_seed(self, rng):
        g = random_connected_graph(rng, 20)
        y = np.full(20, -1)
        y[:6] = [0, 1, 2, 0, 1, 2]
        Y = label_propagation(g, y, 3, alpha=0.0, iterations=13)
        Y0 = np.zeros((20, 3))
        Y0[np.arange(6), y[:6]] = 1
        np.testing.assert_array_equal(Y, Y0)

    def test_symmetric_tie_breaks_low(self, p3):
        Y = label_propagation(p3, [0, -1, 1], 2, alpha=0.9)
        assert Y[1, 0] == Y[1, 1]
        assert predict(Y)[1] == 0

    def test_fully_labeled(self, rng):
        g = random_connected_graph(rng, 15)
        y = rng.integers(0, 3, size=15)
        y[:3] = [0, 1, 2]
        np.testing.assert_array_equal(predict(label_propagation(g, y, alpha=0.7)), y)

    def test_nonnegative_and_no_labels_error(self, rng):
        g = random_connected_graph(rng, 25)
        y = np.full(25, -1)
        y[[0, 5]] = [0, 1]
        assert (label_propagation(g, y, alpha=0.99) >= 0).all()
        with pytest.raises(ValueError):
            label_propagation(g, np.full(25, -1))

    def test_two_cliques(self):
        edges = [(i, j) for i in range(5) for j in range(i)]
        edges += [(i + 5, j + 5) for i in range(5) for j in range(i)] + [(4, 5)]
        g = build_graph(edges, 10)
        y = np.full(10, -1)
        y[0], y[9] = 0, 1
        np.testing.assert_array_equal(predict(label_propagation(g, y, alpha=0.9)), [0] * 5 + [1] * 5)


def test_label_propagation_resets_only_after_iterating(p3):
    # Y1 = [0.5, sqrt2/4, 0]; Y2 = 0.5 * A Y1 + 0.5 * Y0 = [0.625, sqrt2/8, 1/8]
    Y = label_propagation(p3, [0, -1, -1], num_classes=1, alpha=0.5, iterations=2)
    np.testing.assert_allclose(Y[:, 0], [1.0, np.sqrt(2) / 8, 0.125], atol=1e-12)
