"""Synthetic timing harness for the propagation kernel."""
from __future__ import annotations

import resource
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .evaluation import MaskSpec, generate_mask
from .graph import build_graph
from .propagation import EmptyChannelWarning, PropagationConfig, feature_propagate


@dataclass
class BenchResult:
    nodes: int
    edges: int
    channels: int
    iterations: int
    build_seconds: float
    seconds: float
    peak_rss_mb: float

    @property
    def iterations_per_second(self) -> float:
        return self.iterations / self.seconds if self.seconds > 0 else float("inf")


def random_graph(num_nodes, avg_degree, seed=0):
    """Uniform random multigraph edges, deduplicated by :func:`build_graph`."""
    rng = np.random.default_rng(seed)
    m = int(num_nodes * avg_degree // 2)
    return build_graph(rng.integers(0, num_nodes, size=(m, 2)), num_nodes)


def peak_rss_mb() -> float:
    # ru_maxrss is KiB on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def run_bench(num_nodes=1000, avg_degree=10, dim=16, iterations=40,
              missing_rate=0.99, seed=0, g=None) -> BenchResult:
    t0 = time.perf_counter()
    if g is None:
        g = random_graph(num_nodes, avg_degree, seed)
    build = time.perf_counter() - t0
    rng = np.random.default_rng(seed + 1)
    X = rng.standard_normal((g.num_nodes, dim))
    M = generate_mask(g.num_nodes, dim, MaskSpec(missing_rate, seed=seed + 2))
    cfg = PropagationConfig(max_iterations=iterations, tolerance=0.0)
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        # random graphs have a few isolated nodes; leaving them unfilled is expected
        warnings.simplefilter("ignore", EmptyChannelWarning)
        _, trace = feature_propagate(g, X, M, cfg)
    seconds = time.perf_counter() - t0
    return BenchResult(g.num_nodes, g.num_edges, dim, trace.iterations,
                       build, seconds, peak_rss_mb())
