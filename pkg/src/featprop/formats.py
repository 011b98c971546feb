"""Text formats: edge lists, feature/mask/label CSVs and report CSVs.

Floats are written with ``repr`` so values round-trip exactly and output
is byte-stable for identical inputs.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


class FormatError(ValueError):
    """Malformed input file; the message names the file and line."""


def read_edge_list(path):
    """Parse whitespace-separated ``i j`` pairs. Returns ``(edges, max_index)``.

    ``#`` starts a comment line; blank lines are skipped.
    """
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected two node ids, got {s!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: node ids must be integers, got {s!r}") from None
            if i < 0 or j < 0:
                raise FormatError(f"{path}:{lineno}: negative node id in {s!r}")
            edges.append((i, j))
    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return arr, (int(arr.max()) if len(arr) else -1)


def write_edge_list(path, edges):
    with open(path, "w") as fh:
        for i, j in np.asarray(edges):
            fh.write(f"{int(i)} {int(j)}\n")


def _parse_value(cell, path, lineno):
    cell = cell.strip()
    if cell == "" or cell.lower() == "nan":
        return math.nan
    try:
        v = float(cell)
    except ValueError:
        raise FormatError(f"{path}:{lineno}: not a number: {cell!r}") from None
    if not math.isfinite(v):
        raise FormatError(f"{path}:{lineno}: non-finite value {cell!r}")
    return v


def _read_node_table(path, parse, num_nodes=None):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}:1: empty file") from None
        if not header or header[0].strip() != "node":
            raise FormatError(f"{path}:1: header must start with 'node'")
        d = len(header) - 1
        rows = {}
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != d + 1:
                raise FormatError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
            try:
                node = int(row[0])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad node id {row[0]!r}") from None
            if node < 0 or (num_nodes is not None and node >= num_nodes):
                raise FormatError(f"{path}:{lineno}: node id {node} out of range")
            if node in rows:
                raise FormatError(f"{path}:{lineno}: duplicate node id {node}")
            rows[node] = [parse(c, path, lineno) for c in row[1:]]
    return header[1:], rows


def read_features(path, num_nodes=None):
    """Read a ``node,f0,f1,...`` CSV.

    Empty cells and ``nan`` mark missing values; nodes absent from the file
    are entirely missing. Returns ``(X, known)`` with missing entries of X
    set to 0.
    """
    names, rows = _read_node_table(path, _parse_value, num_nodes)
    n = num_nodes if num_nodes is not None else (max(rows) + 1 if rows else 0)
    X = np.full((n, len(names)), np.nan)
    for node, vals in rows.items():
        X[node] = vals
    known = ~np.isnan(X)
    return np.where(known, X, 0.0), known


def _parse_flag(cell, path, lineno):
    cell = cell.strip()
    if cell not in ("0", "1"):
        raise FormatError(f"{path}:{lineno}: mask entries must be 0 or 1, got {cell!r}")
    return cell == "1"


def read_mask(path, num_nodes, num_channels):
    names, rows = _read_node_table(path, _parse_flag, num_nodes)
    if len(names) != num_channels:
        raise FormatError(
            f"{path}:1: mask has {len(names)} channels, features have {num_channels}"
        )
    M = np.zeros((num_nodes, num_channels), dtype=bool)
    for node, vals in rows.items():
        M[node] = vals
    return M


def read_labels(path, num_nodes=None):
    """Read a ``node,label`` CSV; unlisted nodes get label -1."""

    def parse(cell, path, lineno):
        try:
            return int(cell)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: bad label {cell!r}") from None

    names, rows = _read_node_table(path, parse, num_nodes)
    if len(names) != 1:
        raise FormatError(f"{path}:1: expected header 'node,label'")
    n = num_nodes if num_nodes is not None else (max(rows) + 1 if rows else 0)
    y = np.full(n, -1, dtype=np.int64)
    for node, (lab,) in rows.items():
        y[node] = lab
    return y


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_features(path, X, names=None):
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    names = names or [f"f{c}" for c in range(X.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", *names])
        for i, row in enumerate(X):
            w.writerow([i, *(fmt(float(v)) for v in row)])


def write_mask(path, M):
    M = np.asarray(M, dtype=bool)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", *(f"f{c}" for c in range(M.shape[1]))])
        for i, row in enumerate(M):
            w.writerow([i, *(int(v) for v in row)])


def write_labels(path, y):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "label"])
        for i, lab in enumerate(np.asarray(y)):
            w.writerow([i, int(lab)])


def write_records(path, records, columns):
    """Write dict rows as CSV with the given column order."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([fmt(r[c]) for c in columns])


def write_energy_trace(path, energies):
    """``iteration,e0,e1,...``; row 0 is the initialized state."""
    E = np.atleast_2d(np.asarray(energies))
    cols = ["iteration", *(f"e{c}" for c in range(E.shape[1]))]
    write_records(
        path,
        [dict(iteration=k, **{f"e{c}": float(v) for c, v in enumerate(row)})
         for k, row in enumerate(E)],
        cols,
    )


def write_spectrum(path, eigenvalues, series):
    """Spectrum export: one row per (series, eigen-index) with the
    eigenvalue, the channel-mean magnitude and per-channel magnitudes.

    ``series`` maps a label to a coefficient matrix ``U^T X``.
    """
    d = next(iter(series.values())).shape[1] if series else 0
    cols = ["series", "index", "eigenvalue", "mean_abs", *(f"c{c}" for c in range(d))]
    records = []
    for label, coef in series.items():
        mag = np.abs(coef)
        for i, lam in enumerate(eigenvalues):
            rec = {"series": label, "index": i, "eigenvalue": float(lam),
                   "mean_abs": float(mag[i].mean())}
            rec.update({f"c{c}": float(mag[i, c]) for c in range(d)})
            records.append(rec)
    write_records(path, records, cols)
