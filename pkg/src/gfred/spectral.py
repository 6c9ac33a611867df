"""Centering, graph Fourier transforms, and the training-time cache.

Transforming a centered data matrix into the graph frequency domain makes
polynomial graph filters act frequency by frequency: a filter bank of
order ``L`` applies the matrix ``sum_l lam_i^l T_l`` to the i-th
transformed column. Training needs, over and over again, the Gram matrix
of the stacked per-frequency feature vectors
``(x_i, lam_i x_i, ..., lam_i^L x_i)``; by a Hadamard identity that Gram
matrix equals ``(Xt' Xt) * V`` with ``V(i,j) = sum_l (lam_i lam_j)^l``,
which keeps every evaluation at n x n cost. ``V`` is accumulated term by
term (the geometric series has no safe closed form at lam_i lam_j = 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SpectralOverflow
from .graph import GraphSpectrum

_POWER_LIMIT = 1e150


@dataclass(frozen=True)
class CenteredDataset:
    centered: np.ndarray  # (dim, n), rows sum to zero
    mean: np.ndarray      # (dim,)
    dim: int
    n: int


def center(X) -> CenteredDataset:
    """Subtract the column mean from every column."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d data matrix, got ndim={X.ndim}")
    if X.shape[1] < 1:
        raise DimensionMismatch("need at least one data column")
    mean = X.mean(axis=1)
    return CenteredDataset(centered=X - mean[:, None], mean=mean, dim=X.shape[0], n=X.shape[1])


def gft(values, spectrum: GraphSpectrum) -> np.ndarray:
    """Graph Fourier transform of per-node columns (right-multiply by U)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != spectrum.n:
        raise DimensionMismatch(
            f"expected {spectrum.n} columns for this graph, got shape {values.shape}"
        )
    return values @ spectrum.eigvecs


def igft(values, spectrum: GraphSpectrum) -> np.ndarray:
    """Inverse transform; exact inverse of :func:`gft` up to roundoff."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != spectrum.n:
        raise DimensionMismatch(
            f"expected {spectrum.n} columns for this graph, got shape {values.shape}"
        )
    return values @ spectrum.eigvecs.T


def eig_power_table(eigvals, order: int) -> np.ndarray:
    """Table of eigenvalue powers 0..order, built by the recurrence
    ``pows[:, l+1] = pows[:, l] * eigvals`` with the 0^0 = 1 convention."""
    if order < 0:
        raise ValueError(f"filter order must be >= 0, got {order}")
    eigvals = np.asarray(eigvals, dtype=np.float64)
    pows = np.empty((eigvals.shape[0], order + 1))
    pows[:, 0] = 1.0
    for ell in range(order):
        pows[:, ell + 1] = pows[:, ell] * eigvals
    if np.any(np.abs(pows) > _POWER_LIMIT):
        raise SpectralOverflow(
            f"|eigenvalue|^l exceeded {_POWER_LIMIT:g} at order {order}; "
            "enable normalize_spectrum on the graph"
        )
    return pows


@dataclass(frozen=True)
class SpectralCache:
    """Everything the trainer needs, precomputed once per (data, graph, order).

    ``kernel`` is the n x n Gram matrix of the stacked per-frequency
    features described in the module docstring; ``mean_energy`` is the
    data's mean squared column norm, the objective value of the all-zero
    filter pair.
    """

    gft_data: np.ndarray    # (dim, n)
    eig_pows: np.ndarray    # (n, order+1)
    kernel: np.ndarray      # (n, n), symmetric positive semidefinite
    mean_energy: float
    order: int
    fingerprint: str

    @property
    def dim(self) -> int:
        return self.gft_data.shape[0]

    @property
    def n(self) -> int:
        return self.gft_data.shape[1]


def build_cache(xbar, spectrum: GraphSpectrum, order: int) -> SpectralCache:
    """Precompute the transformed data, power table, and feature kernel."""
    xt = gft(xbar, spectrum)
    pows = eig_power_table(spectrum.eigvals, order)
    base = xt.T @ xt
    geo = pows @ pows.T  # term-by-term geometric sums
    kernel = base * geo
    kernel = 0.5 * (kernel + kernel.T)
    energy = float(np.sum(xt * xt)) / xt.shape[1]
    return SpectralCache(
        gft_data=xt,
        eig_pows=pows,
        kernel=kernel,
        mean_energy=energy,
        order=order,
        fingerprint=spectrum.fingerprint(),
    )


def spectral_response(taps, lam: float) -> np.ndarray:
    """Frequency response ``sum_l lam^l taps[l]`` of a tap stack at one
    eigenvalue, with 0^0 = 1 so the order-0 term always passes through."""
    taps = np.asarray(taps, dtype=np.float64)
    if taps.ndim != 3:
        raise DimensionMismatch(f"expected a (order+1, rows, cols) tap stack, got {taps.shape}")
    out = taps[0].copy()
    power = 1.0
    for ell in range(1, taps.shape[0]):
        power *= lam
        out += power * taps[ell]
    return out


def apply_response(taps, eig_pows, vectors) -> np.ndarray:
    """Apply per-frequency responses to per-frequency columns.

    Column i of the result is ``(sum_l lam_i^l taps[l]) @ vectors[:, i]``,
    evaluated without materializing any per-frequency matrix.
    """
    out = taps[0] @ vectors
    for ell in range(1, taps.shape[0]):
        out += taps[ell] @ (vectors * eig_pows[:, ell])
    return out
