"""Figures written next to the CSV reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

# fixed colors so figures from different runs line up
METHOD_COLORS = {
    "fp": "tab:red",
    "zero": "tab:gray",
    "random": "tab:olive",
    "global_mean": "tab:blue",
    "neighbor_mean": "tab:green",
    "lp": "tab:purple",
}


def new_figure(width=4.5, height=None):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def save(fig, path):
    # no timestamp metadata, so repeated runs give identical files
    with plt.rc_context(STYLE):
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_spectrum(eigenvalues, profiles, path, bins=50):
    """Mean |Fourier coefficient| against eigenvalue, one line per series.

    Profiles are averaged within equal-width eigenvalue bins so that dense
    spectra stay readable.
    """
    fig, ax = new_figure()
    edges = np.linspace(0.0, 2.0, bins + 1)
    which = np.clip(np.digitize(eigenvalues, edges) - 1, 0, bins - 1)
    centers = 0.5 * (edges[1:] + edges[:-1])
    for label, prof in profiles.items():
        sums = np.bincount(which, weights=prof, minlength=bins)
        cnt = np.bincount(which, minlength=bins)
        keep = cnt > 0
        ax.plot(centers[keep], sums[keep] / cnt[keep], label=label,
                color="tab:red" if label == "original" else None)
    ax.set_xlabel("Laplacian eigenvalue")
    ax.set_ylabel("mean |coefficient|")
    ax.set_yscale("log")
    ax.legend(frameon=False)
    save(fig, path)


def plot_accuracy(summary, path):
    """Test accuracy (mean and standard error) against missing rate."""
    fig, ax = new_figure()
    methods = list(dict.fromkeys(r["method"] for r in summary))
    for m in methods:
        rows = sorted((r for r in summary if r["method"] == m), key=lambda r: r["missing_rate"])
        x = [r["missing_rate"] for r in rows]
        y = np.array([r["accuracy_mean"] for r in rows])
        e = np.array([r["accuracy_stderr"] for r in rows])
        ax.errorbar(x, y, yerr=e, marker="o", ms=3, capsize=2, label=m,
                    color=METHOD_COLORS.get(m))
    ax.set_xlabel("missing rate")
    ax.set_ylabel("test accuracy")
    ax.legend(frameon=False)
    save(fig, path)


def plot_energy_trace(energies, path):
    """Total Dirichlet energy per iteration."""
    fig, ax = new_figure()
    E = np.atleast_2d(energies).sum(axis=1)
    ax.plot(np.arange(len(E)), E, color="tab:red")
    ax.set_xlabel("iteration")
    ax.set_ylabel("Dirichlet energy")
    save(fig, path)
