"""Plain PCA baseline on centered columns.

The covariance here is normalized by n (not n - 1) to match the training
objective of the filter modules, so baseline and filter MSE values are
directly comparable.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, RankDeficiencyWarning
from .graph import canonical_signs
from .spectral import CenteredDataset


@dataclass(frozen=True)
class PcaModel:
    k: int
    basis: np.ndarray    # (dim, k), orthonormal columns, canonical signs
    mean: np.ndarray     # (dim,)
    eigvals: np.ndarray  # (min(dim, n),) covariance eigenvalues, descending


def pca_fit(ds: CenteredDataset, k: int) -> PcaModel:
    """Top-k eigenvectors of the n-normalized covariance.

    For tall data (dim > n) the spectrum is taken from the thin SVD of the
    centered matrix, which has the same nonzero eigenvalues as the
    covariance without ever forming the dim x dim matrix. Warns with
    RankDeficiencyWarning when the k-th eigenvalue is at numerical zero.
    """
    if not 1 <= k <= min(ds.dim, ds.n):
        raise DimensionMismatch(f"k={k} out of range for dim={ds.dim}, n={ds.n}")
    xb = ds.centered
    if ds.dim <= ds.n:
        cov = (xb @ xb.T) / ds.n
        try:
            vals, vecs = np.linalg.eigh(cov)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(f"covariance eigendecomposition failed: {exc}") from exc
        order = np.argsort(-vals, kind="stable")
        eigvals = vals[order]
        basis = vecs[:, order[:k]]
    else:
        try:
            left, sing, _ = np.linalg.svd(xb, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(f"svd failed: {exc}") from exc
        eigvals = sing * sing / ds.n
        basis = left[:, :k]
    basis = canonical_signs(basis)
    if eigvals[k - 1] <= 1e-12 * max(eigvals[0], 0.0):
        warnings.warn(
            f"component {k} sits at numerical zero variance", RankDeficiencyWarning, stacklevel=2
        )
    return PcaModel(k=k, basis=basis, mean=ds.mean.copy(), eigvals=eigvals)


def pca_mse(ds: CenteredDataset, model: PcaModel) -> float:
    """Mean squared residual of projecting onto the model's basis."""
    if model.basis.shape[0] != ds.dim:
        raise DimensionMismatch(
            f"model dim {model.basis.shape[0]} does not match data dim {ds.dim}"
        )
    scores = model.basis.T @ ds.centered
    resid = ds.centered - model.basis @ scores
    return float(np.sum(resid * resid)) / ds.n
