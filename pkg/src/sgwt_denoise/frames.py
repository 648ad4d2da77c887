"""Spectral partition of unity and the associated Parseval tight frame."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError
from .graph import EigenSystem

_POWER_RTOL = 1e-12


def scale_count(lmax: float, b: float) -> int:
    """Number of band-pass scales J = floor(log(lmax) / log(b)) + 2.

    The integer part of the logarithm ratio is settled by comparing powers of
    ``b`` against ``lmax`` with a relative tolerance, so exact powers (lmax=8,
    b=2) do not flip between platforms. J is clamped at 0.
    """
    if not b > 1:
        raise ParameterError(f"scale parameter b must be > 1, got {b}")
    if not lmax > 0 or not math.isfinite(lmax):
        raise ParameterError(f"lmax must be positive and finite, got {lmax}")
    k = math.floor(math.log(lmax) / math.log(b))
    while b ** (k + 1) <= lmax * (1 + _POWER_RTOL):
        k += 1
    while b**k > lmax * (1 + _POWER_RTOL):
        k -= 1
    return max(k + 2, 0)


def omega(x, b: float):
    """Raised-cosine low-pass profile.

    Equal to 1 on [0, 1/b], 0 on [1, inf), and ``(1 + cos(pi (b x - 1)/(b - 1))) / 2``
    in between. Accepts scalars or arrays.
    """
    if not b > 1:
        raise ParameterError(f"scale parameter b must be > 1, got {b}")
    x = np.asarray(x, dtype=float)
    ramp = (1.0 + np.cos(np.pi * (b * x - 1.0) / (b - 1.0))) / 2.0
    out = np.where(x <= 1.0 / b, 1.0, np.where(x >= 1.0, 0.0, ramp))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class FilterBank:
    """The family psi_0..psi_J on [0, lmax] built from :func:`omega`."""

    b: float
    lmax: float
    J: int = field(init=False)

    def __post_init__(self):
        if not self.b > 1:
            raise ParameterError(f"scale parameter b must be > 1, got {self.b}")
        if not self.lmax > 0:
            raise ParameterError(f"lmax must be > 0, got {self.lmax}")
        object.__setattr__(self, "J", scale_count(self.lmax, self.b))

    def psi(self, j: int, x):
        """Evaluate the j-th filter; x is clamped to [0, lmax]."""
        if not 0 <= j <= self.J:
            raise IndexError(f"scale {j} out of range 0..{self.J}")
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.lmax)
        if j == 0:
            return omega(x, self.b)
        return omega(x * self.b ** (-j), self.b) - omega(x * self.b ** (-j + 1), self.b)

    def all(self, x) -> np.ndarray:
        """Stack of every filter at ``x``: shape (J + 1, *x.shape)."""
        return np.stack([np.asarray(self.psi(j, x)) for j in range(self.J + 1)])


def psi(j: int, x, bank: FilterBank):
    return bank.psi(j, x)


@dataclass(frozen=True)
class TightFrame:
    """Stacked frame operator of shape (n (J+1), n).

    Row block j (rows ``j*n`` to ``(j+1)*n - 1``) is ``sqrt(psi_j)(L)``.
    """

    matrix: np.ndarray
    J: int
    b: float

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    def block(self, j: int) -> np.ndarray:
        n = self.n
        return self.matrix[j * n:(j + 1) * n]


def spectral_multipliers(es: EigenSystem, b: float) -> np.ndarray:
    """sqrt(psi_j(lambda_i)) for every scale and eigenvalue, shape (J+1, n)."""
    if not es.lmax > 0:
        raise ValidationError("degenerate spectrum: largest eigenvalue is 0 (graph has no edges)")
    bank = FilterBank(b, es.lmax)
    return np.sqrt(np.clip(bank.all(es.evalues), 0.0, 1.0))


def tight_frame(es: EigenSystem, b: float) -> TightFrame:
    """Materialise the frame ``[sqrt(psi_0)(L); ...; sqrt(psi_J)(L)]``."""
    mult = spectral_multipliers(es, b)
    u = es.evectors
    blocks = [(u * m) @ u.T for m in mult]
    # symmetrise away rounding so each block is exactly symmetric
    blocks = [(B + B.T) / 2.0 for B in blocks]
    return TightFrame(np.vstack(blocks), J=mult.shape[0] - 1, b=float(b))


def filter_curves(bank: FilterBank, num_samples: int) -> np.ndarray:
    """Sample every filter uniformly on [0, lmax].

    Returns:
        Array of shape (num_samples, J + 2); column 0 is x, then psi_0..psi_J.
    """
    if int(num_samples) < 2:
        raise ParameterError(f"num_samples must be >= 2, got {num_samples}")
    x = np.linspace(0.0, bank.lmax, int(num_samples))
    return np.column_stack([x, bank.all(x).T])
