"""Coefficient shrinkage with SURE-driven threshold selection.

All stochastic helpers take an explicit integer seed and draw from
``numpy.random.Generator(PCG64(seed))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ParameterError, ValidationError
from .frames import TightFrame, spectral_multipliers
from .graph import EigenSystem, SparseGraph

#: Hard thresholding (the beta -> infinity limit of :func:`betathresh`).
HARD = math.inf


class ThreshPolicy(str, enum.Enum):
    """How the common threshold is applied to each coefficient."""

    UNIFORM = "uniform"
    DEPENDENT = "dependent"


@dataclass(frozen=True)
class NoiseModel:
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ParameterError(f"sigma must be finite and > 0, got {self.sigma}")


@dataclass
class ThreshSweepResult:
    """Risk curves over a threshold grid.

    ``mse`` is measured in coefficient space against the clean coefficients;
    ``sure`` estimates the same quantity from the noisy coefficients alone.
    ``kept_coeffs`` has one column per threshold when requested.
    """

    thresholds: np.ndarray
    mse: np.ndarray
    sure: np.ndarray
    min_mse_idx: int
    min_sure_idx: int
    kept_coeffs: np.ndarray | None = None

    @property
    def mse_threshold(self) -> float:
        return float(self.thresholds[self.min_mse_idx])

    @property
    def sure_threshold(self) -> float:
        return float(self.thresholds[self.min_sure_idx])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if math.isnan(beta) or beta < 1:
        raise ParameterError(f"beta must be >= 1 or infinite, got {beta}")
    return beta


def _policy(policy) -> ThreshPolicy:
    try:
        return ThreshPolicy(policy)
    except ValueError:
        raise ParameterError(f"unknown threshold policy {policy!r}") from None


def betathresh(x, t, beta: float) -> np.ndarray:
    """Shrink ``x`` by ``x * max(1 - t^beta |x|^-beta, 0)``.

    ``t`` may be a scalar or an array broadcastable against ``x``. beta=1 is
    soft, beta=2 James-Stein, ``HARD`` (infinity) keeps ``x`` where ``|x| > t``.
    Coefficients with ``|x| <= t`` are set to zero.
    """
    beta = _check_beta(beta)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("thresholds must be >= 0")
    ax = np.abs(x)
    alive = ax > t
    if math.isinf(beta):
        return np.where(alive, x, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = 1.0 - (t / np.where(alive, ax, 1.0)) ** beta
    return np.where(alive, x * gain, 0.0)


def betathresh_derivative(x, t, beta: float) -> np.ndarray:
    """Diagonal derivative d tau(x_i) / d x_i (0 on the kill zone |x| <= t)."""
    beta = _check_beta(beta)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    ax = np.abs(x)
    alive = ax > t
    if math.isinf(beta):
        return alive.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 1.0 + (beta - 1.0) * (t / np.where(alive, ax, 1.0)) ** beta
    return np.where(alive, d, 0.0)


def coefficient_thresholds(t: float, diag_wwt, policy) -> np.ndarray | float:
    """Per-coefficient thresholds: ``t`` or ``t * sqrt(diag_wwt)``."""
    if _policy(policy) is ThreshPolicy.UNIFORM:
        return float(t)
    return float(t) * np.sqrt(np.asarray(diag_wwt, dtype=float))


def _sure_inputs(wc_noisy, sigma, diag_wwt):
    x = np.asarray(wc_noisy, dtype=float).ravel()
    d = np.asarray(diag_wwt, dtype=float).ravel()
    if not (math.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be finite and > 0, got {sigma}")
    if x.size != d.size:
        raise ValidationError(f"{x.size} coefficients but {d.size} Gram diagonal entries")
    # zero rows occur when no eigenvalue falls in a band
    if np.any(d < 0) or np.any(d > 1 + 1e-10):
        raise ValidationError("Gram diagonal entries must lie in [0, 1]")
    return x, d


def _sure(x, d, h, dh, n_signal, sigma):
    s2 = sigma * sigma
    return -n_signal * s2 + float(np.sum((h - x) ** 2)) + 2.0 * s2 * float(np.sum(d * dh))


def sure_value(wc_noisy, t: float, beta: float, sigma: float, diag_wwt, policy="uniform",
               n: int | None = None) -> float:
    """Stein unbiased estimate of ``||tau(W f~) - W f||^2``.

    The noise covariance of the frame coefficients is ``sigma^2 W W*``; only its
    diagonal (``diag_wwt``) enters because the shrinkage acts componentwise.

    Args:
        wc_noisy: noisy coefficients (WaveletCoeffs or array).
        t: common threshold.
        beta: shrinkage exponent (>= 1 or ``HARD``).
        sigma: noise standard deviation.
        diag_wwt: diagonal of ``W W*``.
        policy: ``"uniform"`` or ``"dependent"``.
        n: number of graph vertices; taken from ``wc_noisy.n`` when omitted,
            otherwise from ``sum(diag_wwt)`` (the trace of ``W W*``).
    """
    x, d = _sure_inputs(wc_noisy, sigma, diag_wwt)
    n_signal = _n_signal(wc_noisy, d, n)
    ti = coefficient_thresholds(t, d, policy)
    return _sure(x, d, betathresh(x, ti, beta), betathresh_derivative(x, ti, beta), n_signal, sigma)


def _n_signal(wc, d, n):
    if n is not None:
        return int(n)
    if hasattr(wc, "n"):
        return int(wc.n)
    return int(round(float(np.sum(d))))


def sure_mse_thresh(wc_noisy, wc_clean, thresholds, diag_wwt, beta: float, sigma: float,
                    policy="uniform", keepwc: bool = False, n: int | None = None) -> ThreshSweepResult:
    """Evaluate coefficient-space MSE and SURE for every candidate threshold.

    Args:
        wc_noisy: noisy frame coefficients.
        wc_clean: clean frame coefficients (for the oracle MSE curve).
        thresholds: ascending candidate grid, typically ``np.sort(np.abs(wc_noisy))``.
        diag_wwt: diagonal of ``W W*`` (see :func:`diag_frame_gram`).
        beta: shrinkage exponent.
        sigma: noise standard deviation.
        policy: ``"uniform"`` or ``"dependent"``.
        keepwc: also return the thresholded coefficients for every candidate.
        n: number of graph vertices (see :func:`sure_value`).

    Returns:
        ThreshSweepResult with argmins taken at the smallest index on ties.
    """
    x, d = _sure_inputs(wc_noisy, sigma, diag_wwt)
    clean = np.asarray(wc_clean, dtype=float).ravel()
    if clean.size != x.size:
        raise ValidationError(f"noisy and clean coefficients differ in length ({x.size} vs {clean.size})")
    grid = np.asarray(thresholds, dtype=float).ravel()
    if grid.size == 0:
        raise ValidationError("threshold grid is empty")
    if np.any(np.diff(grid) < 0):
        raise ValidationError("threshold grid must be sorted ascending")
    if np.any(grid < 0):
        raise ParameterError("thresholds must be >= 0")
    policy = _policy(policy)
    n_signal = _n_signal(wc_noisy, d, n)

    mse = np.empty(grid.size)
    sure = np.empty(grid.size)
    kept = np.empty((x.size, grid.size)) if keepwc else None
    for k, t in enumerate(grid):
        ti = coefficient_thresholds(t, d, policy)
        h = betathresh(x, ti, beta)
        mse[k] = np.sum((h - clean) ** 2)
        sure[k] = _sure(x, d, h, betathresh_derivative(x, ti, beta), n_signal, sigma)
        if kept is not None:
            kept[:, k] = h
    return ThreshSweepResult(
        thresholds=grid,
        mse=mse,
        sure=sure,
        min_mse_idx=int(np.argmin(mse)),
        min_sure_idx=int(np.argmin(sure)),
        kept_coeffs=kept,
    )


def diag_frame_gram(frame: TightFrame) -> np.ndarray:
    """Diagonal of ``W W*``: squared Euclidean norm of every frame row."""
    return np.einsum("ij,ij->i", frame.matrix, frame.matrix)


def diag_frame_gram_spectral(es: EigenSystem, b: float) -> np.ndarray:
    """Same as :func:`diag_frame_gram` without building the frame."""
    mult = spectral_multipliers(es, b)
    u2 = es.evectors**2
    return (mult**2 @ u2.T).ravel()


def estimate_gamma_mc(es: EigenSystem, b: float, sigma: float, num_draws: int, seed: int) -> np.ndarray:
    """Monte-Carlo estimate of the per-coefficient noise variance ``sigma^2 diag(W W*)``.

    Transforms ``num_draws`` white Gaussian vectors with the eigenbasis SGWT and
    averages the squared coefficients (the noise mean is known to be zero).
    """
    if int(num_draws) < 1:
        raise ParameterError(f"num_draws must be >= 1, got {num_draws}")
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    mult = spectral_multipliers(es, b)
    u = es.evectors
    xi = _rng(seed).standard_normal((es.n, int(num_draws))) * sigma
    spectra = u.T @ xi
    acc = np.empty(mult.shape)
    for j, m in enumerate(mult):
        coeffs = u @ (m[:, None] * spectra)
        acc[j] = np.mean(coeffs**2, axis=1)
    return acc.ravel()


def _spectral_radius(a: sp.spmatrix) -> float:
    n = a.shape[0]
    if n <= 512:
        return float(np.max(np.abs(np.linalg.eigvalsh(a.toarray()))))
    vals = spla.eigsh(a.astype(float), k=1, which="LM", return_eigenvectors=False)
    return float(np.abs(vals[0]))


def randsignal(eta: float, k: int, g: SparseGraph, seed: int, max_redraws: int = 100) -> np.ndarray:
    """Random unit-norm test signal, sparse for small ``eta`` and smoother for larger ``k``.

    A sparse Rademacher seed (each vertex active with probability ``eta``) is
    diffused ``k`` times by the adjacency matrix scaled to unit spectral radius,
    then normalised.
    """
    if not 0 < eta <= 1:
        raise ParameterError(f"eta must lie in (0, 1], got {eta}")
    if int(k) != k or k < 0:
        raise ParameterError(f"k must be a non-negative integer, got {k}")
    a = g.weights
    if k >= 1:
        if a.nnz == 0:
            raise ValidationError("diffusion needs at least one edge")
        a = a / _spectral_radius(a)
    rng = _rng(seed)
    for _ in range(max_redraws):
        support = rng.random(g.n) < eta
        signs = rng.choice(np.array([-1.0, 1.0]), size=g.n)
        x = np.where(support, signs, 0.0)
        for _ in range(int(k)):
            x = a @ x
        norm = np.linalg.norm(x)
        if norm > 0:
            return x / norm
    raise ValidationError("signal support empty after repeated draws")


def add_noise(f, noise: NoiseModel | float, seed: int) -> np.ndarray:
    """Return ``f + xi`` with i.i.d. ``N(0, sigma^2)`` noise."""
    if not isinstance(noise, NoiseModel):
        noise = NoiseModel(float(noise))
    f = np.asarray(f, dtype=float)
    return f + _rng(seed).normal(0.0, noise.sigma, size=f.shape)


def snr(f, fhat) -> float:
    """Signal-to-noise ratio ``10 log10(||f||^2 / ||f - fhat||^2)`` in dB.

    Returns ``math.inf`` when ``fhat`` equals ``f`` exactly.
    """
    f = np.asarray(f, dtype=float)
    fhat = np.asarray(fhat, dtype=float)
    if f.shape != fhat.shape:
        raise ValidationError(f"signal shapes differ: {f.shape} vs {fhat.shape}")
    energy = float(np.sum(f**2))
    if energy == 0:
        raise ParameterError("reference signal is identically zero")
    err = float(np.sum((f - fhat) ** 2))
    if err == 0:
        return math.inf
    return 10.0 * math.log10(energy / err)
