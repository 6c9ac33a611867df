"""Similarity graphs over data columns and their spectra.

A data matrix with one observation per column is turned into a dense
symmetric similarity matrix (cosine or Gaussian kernel), sparsified by
keeping the strongest neighbors of every node, and eigendecomposed. The
eigenvector matrix of the symmetric adjacency is the Fourier basis used by
every other module, so this module pins down the conventions the rest of
the package relies on: eigenvalues sorted in descending order, and each
eigenvector scaled so that its largest-magnitude entry is nonnegative.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    KnnTooLarge,
    ZeroColumn,
)


class Kernel(Enum):
    COSINE = "cosine"
    GAUSSIAN = "gaussian"


class Symmetrization(Enum):
    """How directed nearest-neighbor marks become undirected edges."""

    UNION = "union"
    MUTUAL = "mutual"


@dataclass(frozen=True)
class SimilarityConfig:
    """Settings for graph construction.

    ``alpha`` is the Gaussian width and participates only when
    ``kernel = GAUSSIAN``. ``knn`` counts neighbors marked per row, checked
    against n - 1 once the data size is known. ``normalize_spectrum``
    divides the sparsified matrix by its largest-magnitude eigenvalue so
    that eigenvalue powers stay bounded for high filter orders.
    """

    kernel: Kernel = Kernel.COSINE
    alpha: float = 0.01
    knn: int = 12
    symmetrization: Symmetrization = Symmetrization.UNION
    normalize_spectrum: bool = False

    def __post_init__(self):
        if not isinstance(self.knn, int) or self.knn < 1:
            raise KnnTooLarge(f"knn must be a positive integer, got {self.knn!r}")
        if self.kernel is Kernel.GAUSSIAN and not self.alpha > 0:
            raise ValueError(f"alpha must be > 0 for the gaussian kernel, got {self.alpha}")


@dataclass(frozen=True)
class GraphSpectrum:
    """Symmetric adjacency together with its full eigendecomposition."""

    n: int
    adjacency: np.ndarray  # (n, n), exactly symmetric
    eigvals: np.ndarray    # (n,), descending
    eigvecs: np.ndarray    # (n, n), orthonormal columns, canonical signs

    def fingerprint(self) -> str:
        """Hash of the eigenpairs, used to pair models with their graph."""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.eigvals, dtype="<f8").tobytes())
        digest.update(np.asarray(self.eigvecs, dtype="<f8").tobytes(order="F"))
        return digest.hexdigest()


def _as_data_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d data matrix, got ndim={X.ndim}")
    if X.shape[1] < 2:
        raise DimensionMismatch(f"need at least 2 data columns, got {X.shape[1]}")
    return X


def similarity_dense(X, cfg: SimilarityConfig) -> np.ndarray:
    """Dense pairwise similarity of the columns of ``X``.

    Cosine entries are inner products of unit-normalized columns, clipped
    into [-1, 1]; the Gaussian kernel is exp(-alpha/2 * squared distance).
    The result is exactly symmetric (enforced by averaging with its own
    transpose, which is bitwise symmetric) and has a zero diagonal.
    """
    X = _as_data_matrix(X)
    if cfg.kernel is Kernel.COSINE:
        norms = np.linalg.norm(X, axis=0)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ZeroColumn(f"column {zero[0]} has zero norm, cosine undefined")
        unit = X / norms
        sim = unit.T @ unit
        sim = 0.5 * (sim + sim.T)
        np.clip(sim, -1.0, 1.0, out=sim)
    else:
        if not cfg.alpha > 0:
            raise ValueError(f"alpha must be > 0 for the gaussian kernel, got {cfg.alpha}")
        sq = np.sum(X * X, axis=0)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (X.T @ X)
        d2 = 0.5 * (d2 + d2.T)
        np.maximum(d2, 0.0, out=d2)
        sim = np.exp(-0.5 * cfg.alpha * d2)
    np.fill_diagonal(sim, 0.0)
    return sim


def knn_sparsify(sim, cfg: SimilarityConfig) -> np.ndarray:
    """Keep each node's strongest neighbors, drop everything else.

    Every row marks its ``cfg.knn`` largest off-diagonal entries (ties go to
    the lower column index). Union symmetrization keeps an entry marked by
    either endpoint, mutual keeps it only when both endpoints marked it.
    Kept entries retain their original values. With
    ``cfg.normalize_spectrum`` the result is divided by its
    largest-magnitude eigenvalue.
    """
    sim = np.asarray(sim, dtype=np.float64)
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise DimensionMismatch(f"similarity matrix must be square, got {sim.shape}")
    if not np.array_equal(sim, sim.T):
        raise ValueError("similarity matrix must be symmetric")
    n = sim.shape[0]
    if cfg.knn > n - 1:
        raise KnnTooLarge(f"knn={cfg.knn} but only {n - 1} neighbors exist")
    ranked = sim.copy()
    np.fill_diagonal(ranked, -np.inf)
    # stable argsort on the negated row: descending value, ties by lower index
    order = np.argsort(-ranked, axis=1, kind="stable")
    marked = np.zeros((n, n), dtype=bool)
    marked[np.arange(n)[:, None], order[:, : cfg.knn]] = True
    if cfg.symmetrization is Symmetrization.UNION:
        keep = marked | marked.T
    else:
        keep = marked & marked.T
    out = np.where(keep, sim, 0.0)
    if cfg.normalize_spectrum:
        radius = float(np.max(np.abs(np.linalg.eigvalsh(out))))
        if radius > 0.0:
            out = out / radius
    return out


def canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is >= 0.

    Ties in magnitude resolve to the lowest row index (argmax semantics),
    which makes the orientation deterministic.
    """
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    lead = np.argmax(np.abs(vectors), axis=0)
    for j, i in enumerate(lead):
        if vectors[i, j] < 0.0:
            vectors[:, j] = -vectors[:, j]
    return vectors


def eigendecompose(adjacency) -> GraphSpectrum:
    """Full eigendecomposition of a symmetric adjacency matrix.

    Eigenvalues come out in descending order (stable on ties) and
    eigenvectors in the canonical sign orientation, so repeated runs on the
    same matrix give identical spectra.
    """
    S = np.asarray(adjacency, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"adjacency must be square, got {S.shape}")
    if not np.array_equal(S, S.T):
        raise ValueError("adjacency must be exactly symmetric")
    try:
        vals, vecs = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = canonical_signs(vecs[:, order])
    return GraphSpectrum(n=S.shape[0], adjacency=S.copy(), eigvals=vals, eigvecs=vecs)


def build_graph(X, cfg: SimilarityConfig) -> GraphSpectrum:
    """similarity_dense -> knn_sparsify -> eigendecompose, in one call."""
    return eigendecompose(knn_sparsify(similarity_dense(X, cfg), cfg))
