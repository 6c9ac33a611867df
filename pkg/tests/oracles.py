"""Independent reference implementations used to verify the fast paths.

Everything here favors directness over speed: entrywise finite
differences, dense line scans, explicitly stacked feature matrices, and
per-row loops. Tests compare library outputs against these.
"""
from typing import NamedTuple

import numpy as np

from gfred.graph import GraphSpectrum, Kernel, SimilarityConfig, build_graph
from gfred.optimizer import objective
from gfred.spectral import CenteredDataset, SpectralCache, build_cache, center


def fd_grad_taps(cache, taps, coeffs, h=1e-6):
    """Central finite differences of the objective in every tap entry."""
    out = np.zeros_like(taps)
    for idx in np.ndindex(taps.shape):
        plus = taps.copy()
        plus[idx] += h
        minus = taps.copy()
        minus[idx] -= h
        out[idx] = (objective(cache, plus, coeffs) - objective(cache, minus, coeffs)) / (2 * h)
    return out


def fd_grad_coeffs(cache, taps, coeffs, h=1e-6):
    out = np.zeros_like(coeffs)
    for idx in np.ndindex(coeffs.shape):
        plus = coeffs.copy()
        plus[idx] += h
        minus = coeffs.copy()
        minus[idx] -= h
        out[idx] = (objective(cache, taps, plus) - objective(cache, taps, minus)) / (2 * h)
    return out


def scan_best_step(cache, taps, coeffs, direction, step, which, points=1001):
    """Argmin of the objective over an even grid on [0, 4*step]."""
    grid = np.linspace(0.0, 4.0 * step, points)
    if which == "taps":
        values = [objective(cache, taps - c * direction, coeffs) for c in grid]
    else:
        values = [objective(cache, taps, coeffs - c * direction) for c in grid]
    best = int(np.argmin(values))
    return grid[best], grid[1] - grid[0]


def stacked_kernel(gft_data, eigvals, order):
    """Gram matrix of explicitly stacked per-frequency feature vectors."""
    blocks = [gft_data * (eigvals**ell)[None, :] for ell in range(order + 1)]
    stacked = np.vstack(blocks)
    return stacked.T @ stacked


def brute_knn_marks(sim, knn):
    """Row-by-row neighbor marking: value descending, ties by lower index."""
    n = sim.shape[0]
    marks = np.zeros((n, n), dtype=bool)
    for i in range(n):
        candidates = [j for j in range(n) if j != i]
        candidates.sort(key=lambda j: (-sim[i, j], j))
        for j in candidates[:knn]:
            marks[i, j] = True
    return marks


class Instance(NamedTuple):
    ds: CenteredDataset
    spectrum: GraphSpectrum
    cache: SpectralCache


def random_instance(rng, n, dim, order, knn=None, normalize=True, scale=1.0) -> Instance:
    """Random data plus the graph and cache the trainer would build on it."""
    X = rng.normal(size=(dim, n)) * scale
    cfg = SimilarityConfig(
        kernel=Kernel.GAUSSIAN,
        alpha=1.0 / dim,
        knn=knn if knn is not None else max(1, min(3, n - 1)),
        normalize_spectrum=normalize,
    )
    spectrum = build_graph(X, cfg)
    ds = center(X)
    cache = build_cache(ds.centered, spectrum, order)
    return Instance(ds, spectrum, cache)


def random_filters(rng, cache, k, scale=0.4):
    taps = rng.normal(size=(cache.order + 1, cache.dim, k)) * scale
    coeffs = rng.normal(size=(k, cache.n)) * scale
    return taps, coeffs
