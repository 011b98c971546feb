"""Command-line entry point: ``featprop {reconstruct,evaluate,spectrum,bench}``.

Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import formats
from .baselines import METHODS, impute
from .bench import run_bench
from .energy import high_frequency_fraction, spectral_energy_profile
from .evaluation import (
    ClassifierHyper,
    Dataset,
    EvalReport,
    MaskSpec,
    SplitSpec,
    edge_homophily,
    generate_mask,
    generate_sbm,
    make_splits,
    run_sweep,
    sbm_for_homophily,
)
from .exact import graph_fourier_transform, laplacian_eigendecomposition
from .graph import GraphError, build_graph
from .propagation import PropagationConfig, feature_propagate

EXIT_OK, EXIT_RUNTIME, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _float_list(s):
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _method_list(s):
    out = [m.strip() for m in s.split(",") if m.strip()]
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {bad}; choose from {', '.join(METHODS)}"
        )
    return out


def _prop_args(p):
    p.add_argument("--iterations", type=int, default=40, help="max FP iterations (default 40)")
    p.add_argument("--step", type=float, default=1.0, help="Euler step size in (0, 2)")
    p.add_argument("--tolerance", type=float, default=1e-6,
                   help="relative change stopping threshold; 0 disables")
    p.add_argument("--init", default="zeros", choices=["zeros", "global_mean", "keep_input"])


def _data_args(p):
    p.add_argument("--graph", help="edge list file")
    p.add_argument("--features", help="feature CSV (node,f0,f1,...)")
    p.add_argument("--labels", help="label CSV (node,label)")
    p.add_argument("--num-nodes", type=int, help="override 1 + max node index")
    g = p.add_argument_group("synthetic SBM (used when --graph is omitted)")
    g.add_argument("--sbm-nodes", type=int, default=3000)
    g.add_argument("--sbm-classes", type=int, default=5)
    g.add_argument("--homophily", type=float, default=0.85)
    g.add_argument("--avg-degree", type=float, default=15.0)
    g.add_argument("--feature-dim", type=int, default=32)
    g.add_argument("--class-scale", type=float, default=0.5)
    g.add_argument("--sbm-seed", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="featprop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", help="fill missing features in a CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--mask", help="0/1 mask CSV overriding inline missing values")
    p.add_argument("--method", default="fp", choices=[m for m in METHODS if m != "lp"])
    p.add_argument("--rate", type=float, help="additionally hide this fraction of entries")
    p.add_argument("--mode", default="entrywise", choices=["entrywise", "nodewise"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-nodes", type=int)
    p.add_argument("--out", required=True, help="output feature CSV")
    p.add_argument("--trace", help="write per-iteration energy CSV (fp only) and a PNG next to it")
    _prop_args(p)

    p = sub.add_parser("evaluate", help="missing-rate sweep with a linear classifier")
    _data_args(p)
    p.add_argument("--methods", type=_method_list, default=["zero", "random", "global_mean",
                                                            "neighbor_mean", "fp", "lp"])
    p.add_argument("--rates", type=_float_list, default=[0.0, 0.5, 0.9, 0.99])
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--mode", default="entrywise", choices=["entrywise", "nodewise"])
    p.add_argument("--train-per-class", type=int, default=20)
    p.add_argument("--val-total", type=int, default=1500)
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--max-epochs", type=int, default=10000)
    p.add_argument("--patience", type=int, default=200)
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock seconds (reports are then not byte-stable)")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True, help="output directory")
    _prop_args(p)

    p = sub.add_parser("spectrum", help="graph Fourier magnitudes before/after FP")
    _data_args(p)
    p.add_argument("--rates", type=_float_list, default=[0.5, 0.9, 0.99])
    p.add_argument("--mode", default="entrywise", choices=["entrywise", "nodewise"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dense-cap", type=int, default=3000,
                   help="refuse graphs with more nodes than this (default 3000)")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True, help="output directory")
    _prop_args(p)

    p = sub.add_parser("bench", help="time FP iterations on a random graph")
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--degree", type=float, default=10.0)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--iterations", type=int, default=40)
    p.add_argument("--rate", type=float, default=0.99)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _prop_cfg(args):
    try:
        return PropagationConfig(args.iterations, args.step, args.tolerance, args.init)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _check_file(path, what):
    if path is None:
        raise InputError(f"--{what} is required")
    if not Path(path).is_file():
        raise InputError(f"{what} file not found: {path}")


def _load_graph(path, num_nodes, at_least=0):
    _check_file(path, "graph")
    edges, max_idx = formats.read_edge_list(path)
    n = num_nodes if num_nodes is not None else max(max_idx + 1, at_least)
    return build_graph(edges, n)


def _load_dataset(args, need_labels):
    if args.graph is None:
        spec = sbm_for_homophily(args.sbm_nodes, args.sbm_classes, args.homophily,
                                 args.avg_degree, feature_dim=args.feature_dim,
                                 class_mean_scale=args.class_scale, seed=args.sbm_seed)
        g, X, y = generate_sbm(spec)
        return Dataset(g, X, y, name="sbm")
    _check_file(args.features, "features")
    X, known = formats.read_features(args.features, args.num_nodes)
    if not known.all():
        raise InputError(f"{args.features}: ground-truth features must be complete")
    g = _load_graph(args.graph, args.num_nodes, X.shape[0])
    if X.shape[0] != g.num_nodes:
        raise InputError(
            f"{args.features}: has {X.shape[0]} nodes, graph has {g.num_nodes}"
        )
    y = None
    if need_labels:
        _check_file(args.labels, "labels")
        y = formats.read_labels(args.labels, g.num_nodes)
    return Dataset(g, X, y, name=Path(args.graph).stem)


def cmd_reconstruct(args):
    cfg = _prop_cfg(args)
    _check_file(args.features, "features")
    X, known = formats.read_features(args.features, args.num_nodes)
    g = _load_graph(args.graph, args.num_nodes, X.shape[0])
    if X.shape[0] < g.num_nodes:
        pad = g.num_nodes - X.shape[0]
        X = np.vstack([X, np.zeros((pad, X.shape[1]))])
        known = np.vstack([known, np.zeros((pad, X.shape[1]), dtype=bool)])
    if args.mask:
        _check_file(args.mask, "mask")
        inline = known
        known = formats.read_mask(args.mask, g.num_nodes, X.shape[1])
        bad = np.argwhere(known & ~inline)
        if len(bad):
            i, j = bad[0]
            raise InputError(
                f"mask marks node {i} channel {j} as known but the feature value is missing"
            )
    if args.rate is not None:
        try:
            spec = MaskSpec(args.rate, args.mode, args.seed)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        known = known & generate_mask(g.num_nodes, X.shape[1], spec)

    if args.trace and args.method == "fp":
        cfg = replace(cfg, record_energy=True)
    out, trace = impute(args.method, g, X, known, seed=args.seed, cfg=cfg)
    formats.write_features(args.out, out)
    if trace is not None:
        print(f"iterations: {trace.iterations}")
        print(f"residual: {trace.final_residual!r}")
        print(f"converged: {trace.converged}")
        if args.trace:
            from .plotting import plot_energy_trace

            formats.write_energy_trace(args.trace, trace.energies)
            plot_energy_trace(trace.energies, Path(args.trace).with_suffix(".png"))
    print(f"unknown entries filled: {int((~known).sum())}")
    return EXIT_OK


def cmd_evaluate(args):
    cfg = _prop_cfg(args)
    for r in args.rates:
        if not 0.0 <= r <= 1.0:
            raise InputError(f"missing rate {r} outside [0, 1]")
    ds = _load_dataset(args, need_labels=True)
    try:
        make_splits(ds.labels, SplitSpec(args.train_per_class, args.val_total, seed=0))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    hyper = ClassifierHyper(lr=args.lr, max_epochs=args.max_epochs, patience=args.patience)
    report = run_sweep(ds, args.methods, args.rates, args.runs, seed=args.seed,
                       mask_mode=args.mode, train_per_class=args.train_per_class,
                       val_total=args.val_total, hyper=hyper, prop_cfg=cfg,
                       record_time=args.timing)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    formats.write_records(out / "report.csv", report.rows, EvalReport.COLUMNS)
    summary = report.aggregate()
    formats.write_records(out / "summary.csv", summary, EvalReport.SUMMARY_COLUMNS)
    if not args.no_figures:
        from .plotting import plot_accuracy

        plot_accuracy(summary, out / "accuracy.png")
    if (ds.labels >= 0).all():
        print(f"edge homophily: {edge_homophily(ds.graph, ds.labels):.4f}")
    for r in summary:
        print(f"{r['method']:>14} rate={r['missing_rate']:<5g} "
              f"acc={r['accuracy_mean']:.4f} +- {r['accuracy_stderr']:.4f}")
    return EXIT_OK


def cmd_spectrum(args):
    cfg = _prop_cfg(args)
    ds = _load_dataset(args, need_labels=False)
    g, X = ds.graph, ds.features
    if g.num_nodes > args.dense_cap:
        raise InputError(
            f"graph has {g.num_nodes} nodes, above the dense eigensolver cap of "
            f"{args.dense_cap}; raise it with --dense-cap if memory allows"
        )
    basis = laplacian_eigendecomposition(g)
    coefs = {"original": graph_fourier_transform(basis, X)}
    feats = {"original": X}
    for rate in args.rates:
        M = generate_mask(g.num_nodes, X.shape[1], MaskSpec(rate, args.mode, args.seed))
        Xr, _ = feature_propagate(g, X, M, cfg)
        label = f"fp@{rate:g}"
        feats[label] = Xr
        coefs[label] = graph_fourier_transform(basis, Xr)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    formats.write_spectrum(out / "spectrum.csv", basis.eigenvalues, coefs)
    summary = []
    for label, Xs in feats.items():
        c = coefs[label]
        summary.append({
            "series": label,
            "feature_norm": float(np.linalg.norm(Xs)),
            "coefficient_norm": float(np.linalg.norm(c)),
            "parseval_error": float(abs(np.linalg.norm(Xs) - np.linalg.norm(c))),
            "high_frequency_fraction": high_frequency_fraction(basis, Xs),
        })
    formats.write_records(out / "spectrum_summary.csv", summary,
                          ["series", "feature_norm", "coefficient_norm",
                           "parseval_error", "high_frequency_fraction"])
    if not args.no_figures:
        from .plotting import plot_spectrum

        profiles = {k: spectral_energy_profile(basis, v) for k, v in feats.items()}
        plot_spectrum(basis.eigenvalues, profiles, out / "spectrum.png")
    for r in summary:
        print(f"{r['series']:>10} high-frequency fraction={r['high_frequency_fraction']:.4f} "
              f"parseval error={r['parseval_error']:.2e}")
    return EXIT_OK


def cmd_bench(args):
    if args.nodes < 1 or args.dim < 1 or args.degree < 0:
        raise InputError("--nodes and --dim must be positive, --degree non-negative")
    res = run_bench(args.nodes, args.degree, args.dim, args.iterations, args.rate, args.seed)
    print(f"nodes: {res.nodes}")
    print(f"edges: {res.edges}")
    print(f"channels: {res.channels}")
    print(f"iterations: {res.iterations}")
    print(f"build seconds: {res.build_seconds:.3f}")
    print(f"seconds: {res.seconds:.3f}")
    print(f"iterations/second: {res.iterations_per_second:.2f}")
    print(f"peak rss MB: {res.peak_rss_mb:.0f}")
    return EXIT_OK


COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "spectrum": cmd_spectrum,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, formats.FormatError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
