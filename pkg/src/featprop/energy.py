"""Dirichlet energy, fixed-point residuals and spectral energy profiles."""
from __future__ import annotations

import numpy as np

from .graph import Graph, spmm


def _as_2d(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return X[:, None] if X.ndim == 1 else X


def dirichlet_energy(g: Graph, X) -> np.ndarray:
    """Per-channel energy ``0.5 * x^T (I - A_norm) x``.

    Uses the matrix form of the normalized Laplacian, whose gradient is
    ``(I - A_norm) x``. This is not the same quantity as
    ``0.5 * sum_ij a_ij (x_i - x_j)^2`` with normalized weights.
    """
    X = _as_2d(X)
    AX = spmm(g, X)
    return 0.5 * (np.einsum("ij,ij->j", X, X) - np.einsum("ij,ij->j", X, AX))


def fixed_point_residual(g: Graph, X, M) -> float:
    """Max of ``|x - (A_norm x)|`` over unknown entries; 0 if none are unknown."""
    X = _as_2d(X)
    unknown = ~_as_2d(M).astype(bool)
    if not unknown.any():
        return 0.0
    return float(np.abs(X - spmm(g, X))[unknown].max())


def spectral_energy_profile(basis, X) -> np.ndarray:
    """Channel-averaged magnitude of the graph Fourier coefficients."""
    X = _as_2d(X)
    if X.shape[0] != basis.eigenvectors.shape[0]:
        raise ValueError(
            f"feature matrix has {X.shape[0]} rows, basis has "
            f"{basis.eigenvectors.shape[0]}"
        )
    return np.abs(basis.eigenvectors.T @ X).mean(axis=1)


def high_frequency_fraction(basis, X) -> float:
    """Share of spectral energy (squared coefficients) strictly above the
    median eigenvalue."""
    coef = basis.eigenvectors.T @ _as_2d(X)
    power = (coef**2).sum(axis=1)
    total = power.sum()
    if total == 0:
        return 0.0
    high = basis.eigenvalues > np.median(basis.eigenvalues)
    return float(power[high].sum() / total)
