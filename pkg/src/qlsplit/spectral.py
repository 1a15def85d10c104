"""Periodic grid, Fourier transform conventions, spectral operators and norms.

Everything in this module works on the domain (-pi, pi] with N equispaced
nodes.  Fourier coefficients follow the Fourier-series convention: the
forward transform carries the 1/N factor, so a plane wave exp(i*k*x) has
coefficient exactly 1 at wavenumber k.  Coefficient arrays are stored in
FFT order, aligned with ``GridSpec.wavenumbers``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "Field",
    "to_spectrum",
    "to_physical",
    "spectral_derivative",
    "free_propagator",
    "apply_mollifier",
    "dealias_two_thirds",
    "krasny_filter",
    "l2_norm",
    "h1_seminorm",
]


@dataclass(frozen=True)
class GridSpec:
    """Equispaced periodic grid on (-pi, pi] with integer wavenumbers.

    Parameters
    ----------
    n_points : int
        Number of nodes N.  Must be even and >= 8.  Nodes sit at
        x_j = -pi + 2*pi*j/N for j = 0..N-1; wavenumbers are the
        integers {-N/2, ..., N/2 - 1} in FFT order.
    """

    n_points: int

    def __post_init__(self) -> None:
        n = self.n_points
        if not isinstance(n, (int, np.integer)):
            raise TypeError(f"n_points must be an integer, got {type(n).__name__}")
        if n < 8 or n % 2 != 0:
            raise ValueError(f"n_points must be even and >= 8, got {n}")

    @cached_property
    def nodes(self) -> np.ndarray:
        x = -np.pi + 2.0 * np.pi * np.arange(self.n_points) / self.n_points
        x.setflags(write=False)
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order: 0, 1, ..., N/2-1, -N/2, ..., -1."""
        k = np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def _k_float(self) -> np.ndarray:
        k = self.wavenumbers.astype(np.float64)
        k.setflags(write=False)
        return k

    @cached_property
    def _k_squared(self) -> np.ndarray:
        k2 = self._k_float**2
        k2.setflags(write=False)
        return k2

    @cached_property
    def _k_first_derivative(self) -> np.ndarray:
        """1j*k multiplier with the unpaired Nyquist mode -N/2 zeroed."""
        k = self._k_float.copy()
        k[self.n_points // 2] = 0.0
        mult = 1j * k
        mult.setflags(write=False)
        return mult

    @cached_property
    def _coeff_phase(self) -> np.ndarray:
        """(-1)**k factors translating raw FFT output (origin at x=0) to x=-pi."""
        phase = np.where(self.wavenumbers % 2 == 0, 1.0, -1.0)
        phase.setflags(write=False)
        return phase

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.n_points

    def __repr__(self) -> str:  # keep reprs short in test output
        return f"GridSpec(n_points={self.n_points})"


@dataclass(frozen=True, eq=False)
class Field:
    """Complex-valued state on a grid; immutable, with a lazy spectral view."""

    grid: GridSpec
    values: np.ndarray
    _spectrum_cache: np.ndarray | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {v.shape} does not match grid with "
                f"{self.grid.n_points} points"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def spectrum(self) -> np.ndarray:
        """Fourier-series coefficients u_hat_k, aligned with grid.wavenumbers."""
        if self._spectrum_cache is None:
            n = self.grid.n_points
            coeffs = self.grid._coeff_phase * np.fft.fft(self.values) / n
            coeffs.setflags(write=False)
            object.__setattr__(self, "_spectrum_cache", coeffs)
        return self._spectrum_cache

    @classmethod
    def from_spectrum(cls, grid: GridSpec, coeffs: np.ndarray) -> "Field":
        return to_physical(coeffs, grid)


def to_spectrum(f: Field) -> np.ndarray:
    """Forward DFT: u_hat_k = (1/N) sum_j u_j exp(-i k x_j).

    Returned array is in FFT order (read-only), aligned with
    ``f.grid.wavenumbers``.
    """
    return f.spectrum


def to_physical(coeffs: np.ndarray, grid: GridSpec) -> Field:
    """Inverse DFT: u_j = sum_k u_hat_k exp(i k x_j)."""
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.shape != (grid.n_points,):
        raise ValueError(
            f"coefficient count {c.shape} does not match grid with "
            f"{grid.n_points} points"
        )
    values = np.fft.ifft(c * grid._coeff_phase) * grid.n_points
    return Field(grid, values)


def spectral_derivative(f: Field, order: int) -> Field:
    """Differentiate by scaling mode k with (i*k)**order.

    Only orders 1 and 2 are supported.  The unpaired Nyquist mode -N/2 is
    zeroed for order 1 and kept (factor -N^2/4) for order 2.
    """
    if order == 1:
        mult = f.grid._k_first_derivative
    elif order == 2:
        mult = -f.grid._k_squared
    else:
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    # (-1)**k phases cancel for diagonal multipliers, so work on raw FFTs.
    values = np.fft.ifft(mult * np.fft.fft(f.values))
    return Field(f.grid, values)


def free_propagator(f: Field, t: float) -> Field:
    """Exact flow of i u_t = -u_xx over duration t: u_hat_k *= exp(-i k^2 t)."""
    values = np.fft.ifft(np.exp(-1j * f.grid._k_squared * t) * np.fft.fft(f.values))
    return Field(f.grid, values)


def mollifier_cutoff(eps: float) -> int:
    """Highest retained wavenumber of the frequency cutoff: floor(1/eps)."""
    if eps <= 0:
        raise ValueError(f"mollifier eps must be positive, got {eps}")
    return int(np.floor(1.0 / eps))


def apply_mollifier(f: Field, eps: float, taper: bool = False) -> Field:
    """Project onto wavenumbers |k| <= floor(1/eps).

    The default realization is a sharp cutoff, which is idempotent.  With
    ``taper=True`` a raised-cosine roll-off is applied over the top 10% of
    the retained band (no longer idempotent; modes near the cutoff are
    attenuated rather than kept verbatim).
    """
    kc = mollifier_cutoff(eps)
    weights = _mollifier_weights(f.grid, kc, taper)
    if weights is None:  # cutoff at or beyond Nyquist band: identity
        return f
    values = np.fft.ifft(weights * np.fft.fft(f.values))
    return Field(f.grid, values)


def _mollifier_weights(grid: GridSpec, kc: int, taper: bool) -> np.ndarray | None:
    kabs = np.abs(grid._k_float)
    if not taper and kc >= grid.n_points // 2:
        return None
    weights = (kabs <= kc).astype(np.float64)
    if taper and kc >= 1:
        start = 0.9 * kc
        band = (kabs > start) & (kabs <= kc)
        weights[band] = np.cos(0.5 * np.pi * (kabs[band] - start) / (kc - start)) ** 2
    return weights


def dealias_two_thirds(f: Field) -> Field:
    """Zero all modes with |k| > floor(N/3) (2/3 rule for quadratic products).

    Off by default everywhere; exposed for experiments on aliasing effects.
    """
    mask = np.abs(f.grid._k_float) <= f.grid.n_points // 3
    return Field(f.grid, np.fft.ifft(mask * np.fft.fft(f.values)))


def krasny_filter(f: Field, delta: float) -> Field:
    """Zero every Fourier coefficient below delta times the spectral maximum.

    The maximizing mode is always retained (strict inequality); an all-zero
    field passes through unchanged.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"krasny delta must lie in (0, 1), got {delta}")
    raw = np.fft.fft(f.values)
    mags = np.abs(raw)
    peak = mags.max()
    if peak == 0.0:
        return f
    raw[mags < delta * peak] = 0.0
    return Field(f.grid, np.fft.ifft(raw))


def l2_norm(f: Field) -> float:
    """Continuum L2(-pi, pi] norm via Parseval: sqrt(2*pi*sum_k |u_hat_k|^2)."""
    c = f.spectrum
    return float(np.sqrt(2.0 * np.pi * np.sum(c.real**2 + c.imag**2)))


def h1_seminorm(f: Field) -> float:
    """L2 norm of the first spatial derivative."""
    return l2_norm(spectral_derivative(f, 1))
