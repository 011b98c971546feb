"""Missingness simulation, splits, synthetic SBM data, a linear downstream
classifier and the sweep that ties them together."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import LP_ALPHAS, impute, label_propagation, predict
from .energy import dirichlet_energy
from .graph import Graph, build_graph
from .propagation import PropagationConfig

MASK_MODES = ("entrywise", "nodewise")


@dataclass(frozen=True)
class MaskSpec:
    missing_rate: float
    mode: str = "entrywise"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.missing_rate <= 1.0:
            raise ValueError(f"missing_rate must lie in [0, 1], got {self.missing_rate}")
        if self.mode not in MASK_MODES:
            raise ValueError(f"mode must be one of {MASK_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class SplitSpec:
    train_per_class: int = 20
    val_total: int = 1500
    seed: int = 0


@dataclass(frozen=True)
class SbmSpec:
    num_nodes: int
    num_classes: int
    p_in: float
    p_out: float
    feature_dim: int = 32
    class_mean_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("p_in", "p_out"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.num_classes < 1 or self.num_nodes < self.num_classes:
            raise ValueError("need num_nodes >= num_classes >= 1")


@dataclass(frozen=True)
class Splits:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


@dataclass(frozen=True)
class Dataset:
    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    name: str = "dataset"

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class ClassifierHyper:
    lr: float = 0.005
    max_epochs: int = 10000
    patience: int = 200
    l2: float = 5e-4
    standardize: bool = True


@dataclass
class ClassifierReport:
    train_accuracy: float
    val_accuracy: float
    test_accuracy: float
    epochs: int
    best_epoch: int
    losses: list = field(default_factory=list, repr=False)


# -- masks and splits ---------------------------------------------------------

def generate_mask(n: int, d: int, spec: MaskSpec) -> np.ndarray:
    """Boolean known-mask; each entry (or each node's row) is missing with
    probability ``spec.missing_rate``.

    Masks drawn with the same seed are nested across rates: an entry missing
    at rate ``r`` is also missing at any rate above ``r``.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.mode == "entrywise":
        return rng.random((n, d)) >= spec.missing_rate
    row = rng.random(n) >= spec.missing_rate
    return np.repeat(row[:, None], d, axis=1)


def make_splits(labels, spec: SplitSpec) -> Splits:
    """Stratified train set, uniform validation set, remaining labeled nodes
    as test set."""
    y = np.asarray(labels)
    rng = np.random.default_rng(spec.seed)
    classes = np.unique(y[y >= 0])
    train = []
    for c in classes:
        members = np.flatnonzero(y == c)
        if len(members) < spec.train_per_class:
            raise ValueError(
                f"class {c} has {len(members)} labeled nodes, "
                f"fewer than train_per_class={spec.train_per_class}"
            )
        train.append(rng.permutation(members)[: spec.train_per_class])
    train = np.concatenate(train) if train else np.zeros(0, dtype=np.int64)
    rest = np.setdiff1d(np.flatnonzero(y >= 0), train)
    if spec.val_total > len(rest):
        raise ValueError(
            f"val_total={spec.val_total} exceeds the {len(rest)} labeled nodes "
            "left after the training split"
        )
    rest = rng.permutation(rest)
    val = rest[: spec.val_total]
    test = rest[spec.val_total :]
    return Splits(np.sort(train), np.sort(val), np.sort(test))


# -- synthetic data -------------------------------------------------------------

def generate_sbm(spec: SbmSpec):
    """Stochastic block model graph with Gaussian class-conditional features.

    Nodes are split into contiguous, near-equal class blocks. Each class gets
    a mean vector drawn once from ``N(0, class_mean_scale^2)``; each node adds
    independent standard normal noise. Returns ``(graph, features, labels)``.
    """
    n, k = spec.num_nodes, spec.num_classes
    rng = np.random.default_rng(spec.seed)
    labels = (np.arange(n) * k) // n
    probs = np.full((k, k), spec.p_out)
    np.fill_diagonal(probs, spec.p_in)

    # sample the strict upper triangle in row chunks to bound memory
    edges = []
    chunk = max(1, 2_000_000 // max(n, 1))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        draw = rng.random((len(rows), n))
        p = probs[labels[rows][:, None], labels[None, :]]
        hit = (draw < p) & (np.arange(n)[None, :] > rows[:, None])
        r, c = np.nonzero(hit)
        edges.append(np.column_stack([rows[r], c]))
    edges = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)

    means = rng.standard_normal((k, spec.feature_dim)) * spec.class_mean_scale
    X = means[labels] + rng.standard_normal((n, spec.feature_dim))
    return build_graph(edges, n), X, labels


def sbm_for_homophily(num_nodes, num_classes, homophily, avg_degree, **kw) -> SbmSpec:
    """SBM spec whose expected edge homophily and average degree match the
    targets (for equal-size blocks)."""
    block = num_nodes / num_classes
    p_in = homophily * avg_degree / max(block - 1, 1)
    p_out = (1.0 - homophily) * avg_degree / max(num_nodes - block, 1)
    return SbmSpec(num_nodes, num_classes, min(p_in, 1.0), min(p_out, 1.0), **kw)


def edge_homophily(g: Graph, labels) -> float:
    """Fraction of undirected edges whose endpoints share a label."""
    y = np.asarray(labels)
    if (y < 0).any():
        raise ValueError("edge homophily requires every node to be labeled")
    e = g.edge_list()
    if len(e) == 0:
        return float("nan")
    return float(np.mean(y[e[:, 0]] == y[e[:, 1]]))


# -- downstream classifier ----------------------------------------------------

def _softmax(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def softmax_loss_grad(W, b, X, Y, l2):
    """Mean cross-entropy plus ``l2/2 * ||W||^2``, and its gradient.

    ``Y`` is one-hot, shape ``(m, C)``.
    """
    P = _softmax(X @ W + b)
    m = X.shape[0]
    loss = -np.sum(Y * np.log(np.clip(P, 1e-300, None))) / m + 0.5 * l2 * np.sum(W * W)
    G = (P - Y) / m
    return loss, X.T @ G + l2 * W, G.sum(axis=0)


def _standardize(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def train_linear_classifier(X, labels, splits: Splits, hyper=ClassifierHyper(), seed=0):
    """Multinomial logistic regression by full-batch gradient descent.

    Keeps the weights with the best validation accuracy (ties broken by
    validation loss) and stops after ``patience`` epochs without
    improvement. Returns ``((W, b), ClassifierReport)``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(labels)
    if len(splits.train) == 0 or len(splits.val) == 0:
        raise ValueError("train and validation splits must be non-empty")
    num_classes = int(y[y >= 0].max()) + 1
    if len(np.unique(y[splits.train])) < 2:
        raise ValueError("training split must contain at least two classes")
    if hyper.standardize:
        X = _standardize(X)

    rng = np.random.default_rng(seed)
    W = rng.standard_normal((X.shape[1], num_classes)) * 0.01
    b = np.zeros(num_classes)
    Xtr, Xva = X[splits.train], X[splits.val]
    Ytr = np.eye(num_classes)[y[splits.train]]
    Yva = np.eye(num_classes)[y[splits.val]]
    yva = y[splits.val]

    best = (-1.0, np.inf)
    best_params = (W.copy(), b.copy())
    best_epoch, stale, epoch = 0, 0, 0
    losses = []
    for epoch in range(1, hyper.max_epochs + 1):
        loss, gW, gb = softmax_loss_grad(W, b, Xtr, Ytr, hyper.l2)
        losses.append(loss)
        W -= hyper.lr * gW
        b -= hyper.lr * gb

        P = _softmax(Xva @ W + b)
        val_acc = float(np.mean(np.argmax(P, axis=1) == yva))
        val_loss = float(-np.sum(Yva * np.log(np.clip(P, 1e-300, None))) / len(yva))
        if (val_acc, -val_loss) > (best[0], -best[1]):
            best = (val_acc, val_loss)
            best_params = (W.copy(), b.copy())
            best_epoch, stale = epoch, 0
        else:
            stale += 1
            if stale >= hyper.patience:
                break

    W, b = best_params

    def acc(idx):
        if len(idx) == 0:
            return float("nan")
        return float(np.mean(np.argmax(X[idx] @ W + b, axis=1) == y[idx]))

    report = ClassifierReport(
        train_accuracy=acc(splits.train),
        val_accuracy=acc(splits.val),
        test_accuracy=acc(splits.test),
        epochs=epoch,
        best_epoch=best_epoch,
        losses=losses,
    )
    return (W, b), report


# -- metrics and sweep --------------------------------------------------------

def rmse_unknown(original, reconstructed, M) -> float:
    """Root mean squared error over the entries with ``M`` false."""
    original = np.asarray(original, dtype=np.float64)
    reconstructed = np.asarray(reconstructed, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    if original.shape != reconstructed.shape or original.shape != M.shape:
        raise ValueError(
            f"shape mismatch: {original.shape}, {reconstructed.shape}, {M.shape}"
        )
    unknown = ~M
    if not unknown.any():
        return 0.0
    diff = original[unknown] - reconstructed[unknown]
    return float(np.sqrt(np.mean(diff**2)))


def known_zscore(X, M):
    """Per-channel mean and std of the known entries (std 1 when undefined)."""
    X = np.asarray(X, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    cnt = M.sum(axis=0)
    mu = np.divide(np.where(M, X, 0).sum(axis=0), cnt, out=np.zeros(X.shape[1]), where=cnt > 0)
    var = np.divide(
        (np.where(M, X - mu, 0) ** 2).sum(axis=0), cnt, out=np.zeros(X.shape[1]), where=cnt > 1
    )
    sd = np.sqrt(var)
    sd[sd == 0] = 1.0
    return mu, sd


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)

    COLUMNS = ("method", "missing_rate", "run", "rmse", "energy", "accuracy", "seconds")
    SUMMARY_COLUMNS = (
        "method", "missing_rate", "runs", "accuracy_mean", "accuracy_stderr",
        "rmse_mean", "energy_mean", "seconds_mean",
    )

    def accuracies(self, method, rate) -> np.ndarray:
        return np.array(
            [r["accuracy"] for r in self.rows
             if r["method"] == method and r["missing_rate"] == rate]
        )

    def aggregate(self) -> list:
        keys = []
        for r in self.rows:
            key = (r["method"], r["missing_rate"])
            if key not in keys:
                keys.append(key)
        out = []
        for method, rate in keys:
            sel = [r for r in self.rows if r["method"] == method and r["missing_rate"] == rate]
            acc = np.array([r["accuracy"] for r in sel])
            stderr = float(acc.std(ddof=1) / math.sqrt(len(acc))) if len(acc) > 1 else 0.0
            out.append({
                "method": method,
                "missing_rate": rate,
                "runs": len(sel),
                "accuracy_mean": float(acc.mean()),
                "accuracy_stderr": stderr,
                "rmse_mean": float(np.mean([r["rmse"] for r in sel])),
                "energy_mean": float(np.mean([r["energy"] for r in sel])),
                "seconds_mean": float(np.mean([r["seconds"] for r in sel])),
            })
        return out


def _run_seeds(master_seed, runs):
    children = np.random.SeedSequence(master_seed).spawn(runs)
    return [[int(s.generate_state(1)[0]) for s in c.spawn(4)] for c in children]


def run_sweep(
    dataset: Dataset,
    methods,
    missing_rates,
    runs: int = 10,
    *,
    seed: int = 0,
    mask_mode: str = "entrywise",
    train_per_class: int = 20,
    val_total: int = 1500,
    hyper: ClassifierHyper = ClassifierHyper(),
    prop_cfg: PropagationConfig | None = None,
    record_time: bool = False,
) -> EvalReport:
    """Impute, train and score every (method, missing rate) pair over
    ``runs`` independent mask/split draws.

    Run ``r`` uses sub-seeds spawned from ``seed``; the mask seed is shared
    across rates within a run so masks are nested. Wall-clock seconds are
    only recorded when ``record_time`` is set (NaN otherwise) so reports are
    reproducible byte for byte.
    """
    g, X, y = dataset.graph, np.asarray(dataset.features, dtype=np.float64), dataset.labels
    n, d = X.shape
    report = EvalReport()
    for run, (mask_seed, split_seed, fill_seed, clf_seed) in enumerate(_run_seeds(seed, runs)):
        splits = make_splits(y, SplitSpec(train_per_class, val_total, split_seed))
        for rate in missing_rates:
            M = generate_mask(n, d, MaskSpec(rate, mask_mode, mask_seed))
            mu, sd = known_zscore(X, M)
            for method in methods:
                t0 = time.perf_counter()
                if method == "lp":
                    acc = _lp_accuracy(g, y, splits, dataset.num_classes)
                    rmse = energy = float("nan")
                else:
                    filled, _ = impute(method, g, X, M, seed=fill_seed, cfg=prop_cfg)
                    if not np.array_equal(filled[M], X[M]):
                        raise RuntimeError(f"method {method!r} altered known entries")
                    _, clf = train_linear_classifier(filled, y, splits, hyper, seed=clf_seed)
                    acc = clf.test_accuracy
                    rmse = rmse_unknown((X - mu) / sd, (filled - mu) / sd, M)
                    energy = float(dirichlet_energy(g, filled).sum())
                seconds = time.perf_counter() - t0 if record_time else float("nan")
                report.rows.append({
                    "method": method,
                    "missing_rate": float(rate),
                    "run": run,
                    "rmse": rmse,
                    "energy": energy,
                    "accuracy": acc,
                    "seconds": seconds,
                })
    return report


def _lp_accuracy(g, y, splits, num_classes, alphas=LP_ALPHAS):
    """Test accuracy of label propagation with alpha chosen on validation."""
    seeds = np.full(len(y), -1)
    seeds[splits.train] = y[splits.train]
    best_val, best_test = -1.0, 0.0
    for alpha in alphas:
        pred = predict(label_propagation(g, seeds, num_classes, alpha=alpha))
        val = float(np.mean(pred[splits.val] == y[splits.val]))
        if val > best_val:
            best_val = val
            best_test = float(np.mean(pred[splits.test] == y[splits.test]))
    return best_test
