import numpy as np
import pytest

from featprop import formats


def test_edge_list_comments_and_blanks(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# header\n0 1\n\n1   2\n  # indented comment\n2\t0\n")
    edges, max_idx = formats.read_edge_list(p)
    np.testing.assert_array_equal(edges, [[0, 1], [1, 2], [2, 0]])
    assert max_idx == 2


@pytest.mark.parametrize("body,lineno", [("0 1\n1\n", 2), ("0 x\n", 1), ("0 1\n-1 2\n", 2), ("0 1 2\n", 1)])
def test_edge_list_errors_are_line_numbered(tmp_path, body, lineno):
    p = tmp_path / "g.txt"
    p.write_text(body)
    with pytest.raises(formats.FormatError, match=f":{lineno}:"):
        formats.read_edge_list(p)


def test_edge_list_round_trip(tmp_path, rng):
    e = rng.integers(0, 50, size=(30, 2))
    formats.write_edge_list(tmp_path / "e.txt", e)
    back, _ = formats.read_edge_list(tmp_path / "e.txt")
    np.testing.assert_array_equal(back, e)


def test_features_missing_cells(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("node,f0,f1\n0,1.5,\n2,nan,3\n1,NaN,-2e-3\n")
    X, known = formats.read_features(p)
    np.testing.assert_array_equal(known, [[True, False], [False, True], [False, True]])
    np.testing.assert_array_equal(X, [[1.5, 0.0], [0.0, -2e-3], [0.0, 3.0]])


def test_features_unlisted_nodes_missing(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("node,f0\n1,4\n")
    X, known = formats.read_features(p, num_nodes=3)
    np.testing.assert_array_equal(known[:, 0], [False, True, False])


@pytest.mark.parametrize("body,lineno", [
    ("id,f0\n0,1\n", 1),
    ("node,f0\n0,1,2\n", 2),
    ("node,f0\n0,1\n0,2\n", 3),
    ("node,f0\n0,abc\n", 2),
    ("node,f0\n0,inf\n", 2),
    ("node,f0\nz,1\n", 2),
])
def test_feature_errors(tmp_path, body, lineno):
    p = tmp_path / "x.csv"
    p.write_text(body)
    with pytest.raises(formats.FormatError, match=f":{lineno}:"):
        formats.read_features(p)


def test_features_round_trip_exact(tmp_path, rng):
    X = rng.standard_normal((7, 3)) * 10.0 ** rng.integers(-8, 8, size=(7, 3))
    formats.write_features(tmp_path / "x.csv", X)
    back, known = formats.read_features(tmp_path / "x.csv")
    assert known.all()
    assert np.array_equal(back, X)


def test_features_byte_format(tmp_path):
    formats.write_features(tmp_path / "x.csv", np.array([[0.1, np.nan], [2.0, -3.5]]))
    assert (tmp_path / "x.csv").read_bytes() == b"node,f0,f1\n0,0.1,nan\n1,2.0,-3.5\n"


def test_mask_round_trip_and_errors(tmp_path):
    M = np.array([[True, False], [False, False], [True, True]])
    formats.write_mask(tmp_path / "m.csv", M)
    assert (tmp_path / "m.csv").read_text() == "node,f0,f1\n0,1,0\n1,0,0\n2,1,1\n"
    np.testing.assert_array_equal(formats.read_mask(tmp_path / "m.csv", 3, 2), M)
    with pytest.raises(formats.FormatError):
        formats.read_mask(tmp_path / "m.csv", 3, 3)
    (tmp_path / "bad.csv").write_text("node,f0\n0,2\n")
    with pytest.raises(formats.FormatError, match=":2:"):
        formats.read_mask(tmp_path / "bad.csv", 1, 1)


def test_labels(tmp_path):
    formats.write_labels(tmp_path / "y.csv", [2, 0, 1])
    np.testing.assert_array_equal(formats.read_labels(tmp_path / "y.csv"), [2, 0, 1])
    (tmp_path / "p.csv").write_text("node,label\n1,3\n")
    np.testing.assert_array_equal(formats.read_labels(tmp_path / "p.csv", 3), [-1, 3, -1])


def test_records_and_trace(tmp_path):
    formats.write_records(tmp_path / "r.csv", [{"a": 1, "b": 0.25}, {"a": 2, "b": float("nan")}], ["a", "b"])
    assert (tmp_path / "r.csv").read_text() == "a,b\n1,0.25\n2,nan\n"
    formats.write_energy_trace(tmp_path / "t.csv", np.array([[1.0, 2.0], [0.5, 1.0]]))
    assert (tmp_path / "t.csv").read_text() == "iteration,e0,e1\n0,1.0,2.0\n1,0.5,1.0\n"


def test_spectrum_export(tmp_path):
    coef = {"original": np.array([[1.0, -2.0], [0.0, 3.0]])}
    formats.write_spectrum(tmp_path / "s.csv", np.array([0.0, 1.5]), coef)
    assert (tmp_path / "s.csv").read_text() == (
        "series,index,eigenvalue,mean_abs,c0,c1\n"
        "original,0,0.0,1.5,1.0,2.0\n"
        "original,1,1.5,1.5,0.0,3.0\n"
    )
