"""Filter training by alternating exact-line-search gradient descent.

The model is a pair: a stack of reconstruction taps (one dim x k matrix
per polynomial order) and a k x n coefficient matrix that parameterizes
the reducing filter through the cached feature kernel. Node i's reduced
vector is ``coeffs @ kernel[:, i]`` and its reconstruction is the tap
stack's frequency response at eigenvalue i applied to that vector. The
training cost is the mean squared spectral-domain residual.

Each iteration takes the exact gradient with respect to the tap stack,
moves to the minimizer of the cost along that ray (the restriction is an
exact quadratic in the step, so the minimizer is a ratio of three
contractions), then recomputes the coefficient gradient at the fresh taps
and does the same along the coefficient ray. Both half-updates therefore
never increase the cost. Iteration stops when the summed Frobenius norm
of the two updates drops below ``epsilon`` or after ``max_iters`` sweeps.

Nonpositive optimal steps are clamped to zero (the stopping test then
sees a zero update), and a direction whose filtered energy is below
1e-300 raises DegenerateDirection, which the driver treats the same way.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, DimensionMismatch, NonFiniteValue
from .graph import GraphSpectrum
from .pca import pca_fit
from .spectral import CenteredDataset, SpectralCache, apply_response, build_cache

_ENERGY_FLOOR = 1e-300
_INIT_RIDGE = 1e-10


@dataclass(frozen=True)
class FilterModel:
    """Trained reducing/reconstruction filter pair."""

    order: int
    k: int
    recon_taps: np.ndarray  # (order+1, dim, k)
    coeffs: np.ndarray      # (k, n)
    mean: np.ndarray        # (dim,)
    spectrum_fingerprint: str

    @property
    def dim(self) -> int:
        return self.recon_taps.shape[1]

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True)
class FitResult:
    model: FilterModel
    objective_trace: np.ndarray  # value at start, then after every half-update
    iterations: int
    converged: bool


def _check_shapes(cache: SpectralCache, taps, coeffs):
    if taps.ndim != 3 or taps.shape[0] != cache.order + 1 or taps.shape[1] != cache.dim:
        raise DimensionMismatch(
            f"tap stack {taps.shape} does not fit order {cache.order}, dim {cache.dim}"
        )
    if coeffs.ndim != 2 or coeffs.shape[1] != cache.n or coeffs.shape[0] != taps.shape[2]:
        raise DimensionMismatch(
            f"coefficients {coeffs.shape} do not fit k={taps.shape[2]}, n={cache.n}"
        )


def _predict(cache: SpectralCache, taps, coeffs):
    reduced = coeffs @ cache.kernel
    return reduced, apply_response(taps, cache.eig_pows, reduced)


def objective(cache: SpectralCache, taps, coeffs) -> float:
    """Mean squared spectral-domain reconstruction error."""
    taps = np.asarray(taps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_shapes(cache, taps, coeffs)
    _, predicted = _predict(cache, taps, coeffs)
    resid = cache.gft_data - predicted
    return float(np.sum(resid * resid)) / cache.n


def grad_taps(cache: SpectralCache, taps, coeffs) -> np.ndarray:
    """Exact gradient of :func:`objective` with respect to the tap stack.

    Order-l slice: ``-2/n * sum_i lam_i^l resid_i reduced_i'``, accumulated
    as one matrix product per order.
    """
    taps = np.asarray(taps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_shapes(cache, taps, coeffs)
    reduced, predicted = _predict(cache, taps, coeffs)
    resid = cache.gft_data - predicted
    out = np.empty_like(taps)
    for ell in range(taps.shape[0]):
        out[ell] = (resid * cache.eig_pows[:, ell]) @ reduced.T
    out *= -2.0 / cache.n
    return out


def grad_coeffs(cache: SpectralCache, taps, coeffs) -> np.ndarray:
    """Exact gradient of :func:`objective` with respect to the coefficients.

    ``-2/n * (sum_l taps[l]' (resid * lam^l)) @ kernel``; the driver calls
    this at the already-updated tap stack.
    """
    taps = np.asarray(taps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_shapes(cache, taps, coeffs)
    reduced, predicted = _predict(cache, taps, coeffs)
    resid = cache.gft_data - predicted
    back = taps[0].T @ resid
    for ell in range(1, taps.shape[0]):
        back += taps[ell].T @ (resid * cache.eig_pows[:, ell])
    return (-2.0 / cache.n) * (back @ cache.kernel)


def step_size_taps(cache: SpectralCache, taps, coeffs, direction) -> float:
    """Exact minimizer of the cost along ``taps - c * direction``.

    The restriction is quadratic in ``c``; with p_i the direction's
    response applied to node i's reduced vector, the minimizer is
    ``(<predicted, p> - <data, p>) / <p, p>`` (each contraction averaged
    over nodes). Raises DegenerateDirection when the quadratic term is
    numerically zero.
    """
    taps = np.asarray(taps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    _check_shapes(cache, taps, coeffs)
    if direction.shape != taps.shape:
        raise DimensionMismatch(f"direction {direction.shape} does not match taps {taps.shape}")
    reduced, predicted = _predict(cache, taps, coeffs)
    moved = apply_response(direction, cache.eig_pows, reduced)
    quad = float(np.sum(moved * moved)) / cache.n
    if not quad > _ENERGY_FLOOR:
        raise DegenerateDirection(f"filtered direction energy {quad:.3e} is numerically zero")
    lin_data = float(np.sum(cache.gft_data * moved)) / cache.n
    lin_model = float(np.sum(predicted * moved)) / cache.n
    return (lin_model - lin_data) / quad


def step_size_coeffs(cache: SpectralCache, taps, coeffs, direction) -> float:
    """Exact minimizer of the cost along ``coeffs - c * direction``."""
    taps = np.asarray(taps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    _check_shapes(cache, taps, coeffs)
    if direction.shape != coeffs.shape:
        raise DimensionMismatch(
            f"direction {direction.shape} does not match coefficients {coeffs.shape}"
        )
    _, predicted = _predict(cache, taps, coeffs)
    moved = apply_response(taps, cache.eig_pows, direction @ cache.kernel)
    quad = float(np.sum(moved * moved)) / cache.n
    if not quad > _ENERGY_FLOOR:
        raise DegenerateDirection(f"filtered direction energy {quad:.3e} is numerically zero")
    lin_data = float(np.sum(cache.gft_data * moved)) / cache.n
    lin_model = float(np.sum(predicted * moved)) / cache.n
    return (lin_model - lin_data) / quad


def init_filters(ds: CenteredDataset, cache: SpectralCache, k: int):
    """PCA-seeded starting point.

    Tap 0 is the top-k PCA basis, higher taps are zero. Coefficients solve
    a ridge-regularized least squares against the training kernel, so the
    start reproduces PCA scores whatever the kernel's order or eigenvalue
    scale (at order 0 the kernel is the spectral data Gram and the start
    ties PCA exactly). The ridge weight is 1e-10 times the kernel's mean
    diagonal, so rank-deficient data still yields a finite start.
    """
    model = pca_fit(ds, k)
    taps = np.zeros((cache.order + 1, ds.dim, k))
    taps[0] = model.basis
    xt = cache.gft_data
    # the reducing filter acts through cache.kernel, not the raw data
    # Gram; solving against anything else gives wildly off-scale starts
    # once eigenvalue powers enter at order >= 1
    trace = float(np.trace(cache.kernel))
    if trace == 0.0:
        return taps, np.zeros((k, cache.n))
    ridge = _INIT_RIDGE * trace / cache.n
    coeffs = np.linalg.solve(
        cache.kernel + ridge * np.eye(cache.n), xt.T @ model.basis
    ).T
    return taps, coeffs


def _clamped_step(step_fn, cache, taps, coeffs, direction) -> float:
    if not np.any(direction):
        return 0.0
    try:
        step = step_fn(cache, taps, coeffs, direction)
    except DegenerateDirection:
        return 0.0
    # nonpositive optimal step means no descent along this ray; stand still
    return step if step > 0.0 else 0.0


def fit(
    ds: CenteredDataset,
    spectrum: GraphSpectrum,
    k: int,
    order: int,
    *,
    epsilon: float | None = None,
    max_iters: int = 500,
    start=None,
    cache: SpectralCache | None = None,
) -> FitResult:
    """Train a filter pair by alternating exact-line-search descent.

    ``epsilon`` defaults to 1e-6 times the summed Frobenius norms of the
    starting point. ``start`` may carry a (taps, coeffs) pair to resume
    from; otherwise :func:`init_filters` seeds the run. ``max_iters=0``
    returns the starting point untouched.
    """
    if max_iters < 0:
        raise ValueError(f"max_iters must be >= 0, got {max_iters}")
    if cache is None:
        cache = build_cache(ds.centered, spectrum, order)
    else:
        if cache.order != order:
            raise DimensionMismatch(f"cache order {cache.order} does not match order {order}")
        if cache.fingerprint != spectrum.fingerprint():
            raise DimensionMismatch("cache was built for a different spectrum")
    if start is None:
        taps, coeffs = init_filters(ds, cache, k)
    else:
        taps = np.array(start[0], dtype=np.float64, copy=True)
        coeffs = np.array(start[1], dtype=np.float64, copy=True)
        if taps.ndim != 3 or taps.shape[2] != k:
            raise DimensionMismatch(f"start taps {taps.shape} do not match k={k}")
        _check_shapes(cache, taps, coeffs)
    if epsilon is None:
        epsilon = 1e-6 * (float(np.linalg.norm(taps)) + float(np.linalg.norm(coeffs)))
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")

    trace = [objective(cache, taps, coeffs)]
    iterations = 0
    converged = False
    for _ in range(max_iters):
        direction_t = grad_taps(cache, taps, coeffs)
        step_t = _clamped_step(step_size_taps, cache, taps, coeffs, direction_t)
        taps_next = taps - step_t * direction_t if step_t else taps
        trace.append(objective(cache, taps_next, coeffs))

        direction_c = grad_coeffs(cache, taps_next, coeffs)
        step_c = _clamped_step(step_size_coeffs, cache, taps_next, coeffs, direction_c)
        coeffs_next = coeffs - step_c * direction_c if step_c else coeffs
        trace.append(objective(cache, taps_next, coeffs_next))

        delta = float(np.linalg.norm(taps_next - taps)) + float(
            np.linalg.norm(coeffs_next - coeffs)
        )
        taps, coeffs = taps_next, coeffs_next
        iterations += 1
        if not (np.isfinite(taps).all() and np.isfinite(coeffs).all()):
            raise NonFiniteValue(f"non-finite iterate at iteration {iterations}")
        if delta < epsilon:
            converged = True
            break

    model = FilterModel(
        order=order,
        k=k,
        recon_taps=taps,
        coeffs=coeffs,
        mean=ds.mean.copy(),
        spectrum_fingerprint=cache.fingerprint,
    )
    return FitResult(
        model=model,
        objective_trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
    )


def stationarity_residual(model: FilterModel, cache: SpectralCache) -> float:
    """Summed Frobenius norms of both gradients at the model's iterate."""
    g_taps = grad_taps(cache, model.recon_taps, model.coeffs)
    g_coeffs = grad_coeffs(cache, model.recon_taps, model.coeffs)
    return float(np.linalg.norm(g_taps)) + float(np.linalg.norm(g_coeffs))


def extend_order(model: FilterModel, cache_old: SpectralCache, cache_new: SpectralCache):
    """Re-seed a higher-order fit from a lower-order solution.

    Taps are zero-padded. Because the coefficient matrix acts through the
    order-dependent kernel, the padded coefficients must be re-solved so
    every node keeps its reduced vector: ``coeffs_new @ kernel_new =
    coeffs_old @ kernel_old`` (least squares, exact when the new kernel has
    full rank). The reseeded pair then reproduces the old objective value.
    """
    if cache_new.order < model.order:
        raise DimensionMismatch(
            f"cannot extend order {model.order} model into order {cache_new.order} cache"
        )
    taps = np.zeros((cache_new.order + 1, model.dim, model.k))
    taps[: model.order + 1] = model.recon_taps
    target = cache_old.kernel @ model.coeffs.T
    solved, *_ = np.linalg.lstsq(cache_new.kernel, target, rcond=None)
    return taps, solved.T
