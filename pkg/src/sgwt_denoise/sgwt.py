"""Forward and inverse spectral graph wavelet transforms.

Two routes compute the same thing: :func:`analysis` / :func:`synthesis` go
through a materialised :class:`~sgwt_denoise.frames.TightFrame`, while
:func:`forward_sgwt` / :func:`inverse_sgwt` work directly in the Laplacian
eigenbasis and never build the frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .frames import TightFrame, spectral_multipliers
from .graph import EigenSystem


@dataclass(frozen=True)
class WaveletCoeffs:
    """Scale-major coefficient vector: ``values[j*n:(j+1)*n]`` is scale j."""

    values: np.ndarray
    n: int
    J: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size != self.n * (self.J + 1):
            raise ValidationError(
                f"coefficient vector has length {v.size}, expected n*(J+1) = {self.n}*{self.J + 1}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("coefficients must be finite")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def block(self, j: int) -> np.ndarray:
        return self.values[j * self.n:(j + 1) * self.n]

    def blocks(self) -> np.ndarray:
        """View as a (J + 1, n) array."""
        return self.values.reshape(self.J + 1, self.n)

    def with_values(self, values) -> "WaveletCoeffs":
        return WaveletCoeffs(values, self.n, self.J)


def _signal(f, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size != n:
        raise ValidationError(f"signal has length {f.size}, graph has {n} vertices")
    return f


def analysis(f, frame: TightFrame) -> WaveletCoeffs:
    """Frame coefficients ``T f``."""
    f = _signal(f, frame.n)
    return WaveletCoeffs(frame.matrix @ f, frame.n, frame.J)


def synthesis(wc, frame: TightFrame) -> np.ndarray:
    """Adjoint ``T^T wc``; inverts :func:`analysis` because the frame is tight."""
    v = np.asarray(wc, dtype=float)
    rows = frame.matrix.shape[0]
    if v.ndim != 1 or v.size != rows:
        raise ValidationError(f"coefficient vector has length {v.size}, frame has {rows} rows")
    return frame.matrix.T @ v


def forward_sgwt(f, es: EigenSystem, b: float) -> WaveletCoeffs:
    """SGWT computed in the eigenbasis, one projection shared by all scales."""
    f = _signal(f, es.n)
    mult = spectral_multipliers(es, b)
    u = es.evectors
    spectrum = u.T @ f
    blocks = (mult * spectrum) @ u.T
    return WaveletCoeffs(blocks.ravel(), es.n, mult.shape[0] - 1)


def inverse_sgwt(wc, es: EigenSystem, b: float) -> np.ndarray:
    """Adjoint of :func:`forward_sgwt`.

    Raises:
        ValidationError: "scale count mismatch" when the coefficient length does
            not equal n (J + 1) for the J implied by ``es.lmax`` and ``b``.
    """
    mult = spectral_multipliers(es, b)
    n = es.n
    v = np.asarray(wc, dtype=float)
    if v.ndim != 1 or v.size != mult.size:
        raise ValidationError(
            f"scale count mismatch: {v.size} coefficients but lmax={es.lmax:g}, b={b:g} "
            f"gives J={mult.shape[0] - 1}, i.e. {mult.size} = {n}*{mult.shape[0]}"
        )
    u = es.evectors
    spectra = v.reshape(mult.shape[0], n) @ u
    return u @ (mult * spectra).sum(axis=0)
