"""PDE family definition, nonlinear potential, exact solutions, initial data.

The equation family is

    i u_t = -u_xx + u f(|u|^2) + sign * u g'(|u|^2) (g(|u|^2))_xx

with polynomial f and g.  ``sign = +1`` selects the pseudo-attractive
superfluid thin-film model, ``-1`` the superfluid thin-film model and
``0`` the plain cubic equation (quasilinear term switched off).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .spectral import Field, GridSpec, l2_norm, spectral_derivative

__all__ = [
    "ModelSpec",
    "Perturbation",
    "Gaussian",
    "PlaneWave",
    "MultiMode",
    "InitialCondition",
    "potential_field",
    "exact_plane_wave",
    "build_initial_condition",
    "ellipticity_indicator",
    "pde_residual",
]

_GPRIME_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class ModelSpec:
    """Nonlinearity selection for the quasilinear Schrodinger family.

    ``f_coeffs`` and ``g_coeffs`` are polynomial coefficients in s = |u|^2,
    ascending order.  ``gprime_coeffs`` defaults to the exact derivative of
    g; if supplied explicitly it is validated against g by central
    differences.
    """

    f_coeffs: tuple[float, ...] = (0.0, 1.0)
    g_coeffs: tuple[float, ...] = (0.0, 1.0)
    quasilinear_sign: int = +1
    gprime_coeffs: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.quasilinear_sign not in (-1, 0, 1):
            raise ValueError(
                f"quasilinear_sign must be -1, 0 or +1, got {self.quasilinear_sign}"
            )
        object.__setattr__(self, "f_coeffs", tuple(float(c) for c in self.f_coeffs))
        object.__setattr__(self, "g_coeffs", tuple(float(c) for c in self.g_coeffs))
        if self.gprime_coeffs is None:
            derived = tuple(float(c) for c in P.polyder(self.g_coeffs))
            object.__setattr__(self, "gprime_coeffs", derived or (0.0,))
        else:
            object.__setattr__(
                self, "gprime_coeffs", tuple(float(c) for c in self.gprime_coeffs)
            )
            self._check_gprime()

    def _check_gprime(self) -> None:
        s = np.linspace(0.0, 2.0, 17)
        h = 1e-5
        fd = (P.polyval(s + h, self.g_coeffs) - P.polyval(s - h, self.g_coeffs)) / (2 * h)
        if np.max(np.abs(P.polyval(s, self.gprime_coeffs) - fd)) > _GPRIME_CHECK_TOL:
            raise ValueError("gprime_coeffs is not the derivative of g_coeffs")

    def f(self, s: np.ndarray) -> np.ndarray:
        return P.polyval(s, self.f_coeffs)

    def g(self, s: np.ndarray) -> np.ndarray:
        return P.polyval(s, self.g_coeffs)

    def gprime(self, s: np.ndarray) -> np.ndarray:
        return P.polyval(s, self.gprime_coeffs)

    @classmethod
    def pseudo_attractive(cls) -> "ModelSpec":
        """f(s) = s, g(s) = s, sign +1 (the model driving the blow-up study)."""
        return cls(quasilinear_sign=+1)

    @classmethod
    def thin_film(cls) -> "ModelSpec":
        """f(s) = s, g(s) = s, sign -1 (superfluid thin-film equation)."""
        return cls(quasilinear_sign=-1)

    @classmethod
    def cubic_nls(cls) -> "ModelSpec":
        """f(s) = s with the quasilinear term switched off."""
        return cls(quasilinear_sign=0)


@dataclass(frozen=True)
class Perturbation:
    """Deterministic single-mode seed added to an initial condition."""

    mode: int
    amplitude: float = 1e-10


@dataclass(frozen=True)
class Gaussian:
    """u(0, x) = a * exp(-x^2 / (2 sigma^2))."""

    amplitude: float
    width: float
    perturbation: Perturbation | None = None

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError(f"Gaussian width must be positive, got {self.width}")


@dataclass(frozen=True)
class PlaneWave:
    """u(0, x) = a * exp(i k x)."""

    amplitude: float
    wavenumber: int
    perturbation: Perturbation | None = None


@dataclass(frozen=True)
class MultiMode:
    """u(0, x) = a * sum_j exp(i k_j x) with 0 <= k_1 < ... < k_j."""

    amplitude: float
    wavenumbers: tuple[int, ...]
    perturbation: Perturbation | None = None

    def __post_init__(self) -> None:
        ks = tuple(int(k) for k in self.wavenumbers)
        if len(ks) == 0:
            raise ValueError("MultiMode requires at least one wavenumber")
        if any(k < 0 for k in ks) or list(ks) != sorted(set(ks)):
            raise ValueError(
                f"MultiMode wavenumbers must be distinct, nonnegative and "
                f"ascending, got {ks}"
            )
        object.__setattr__(self, "wavenumbers", ks)


InitialCondition = Gaussian | PlaneWave | MultiMode


def _check_mode(k: int, grid: GridSpec, what: str) -> None:
    if abs(int(k)) >= grid.n_points // 2:
        raise ValueError(
            f"{what} {k} is not representable on a grid with "
            f"{grid.n_points} points (need |k| < N/2)"
        )


def potential_field(model: ModelSpec, f: Field) -> np.ndarray:
    """Nodewise real potential f(|u|^2) + sign * g'(|u|^2) * (g(|u|^2))_xx.

    The second derivative is evaluated spectrally; the (machine-level)
    imaginary residue of that round trip is discarded.
    """
    s = f.values.real**2 + f.values.imag**2
    v = model.f(s)
    if model.quasilinear_sign != 0:
        g_field = Field(f.grid, model.g(s))
        lap = spectral_derivative(g_field, 2).values.real
        v = v + model.quasilinear_sign * model.gprime(s) * lap
    return v


def exact_plane_wave(a: float, k: int, t: float, grid: GridSpec) -> Field:
    """Wave train a*exp(i(kx - omega t)) with dispersion omega = k^2 + a^2."""
    _check_mode(k, grid, "plane-wave wavenumber")
    omega = k * k + a * a
    return Field(grid, a * np.exp(1j * (k * grid.nodes - omega * t)))


def build_initial_condition(ic: InitialCondition, grid: GridSpec) -> Field:
    """Sample an initial-condition description onto the grid."""
    x = grid.nodes
    if isinstance(ic, Gaussian):
        u = ic.amplitude * np.exp(-(x**2) / (2.0 * ic.width**2)).astype(complex)
    elif isinstance(ic, PlaneWave):
        _check_mode(ic.wavenumber, grid, "plane-wave wavenumber")
        u = ic.amplitude * np.exp(1j * ic.wavenumber * x)
    elif isinstance(ic, MultiMode):
        for k in ic.wavenumbers:
            _check_mode(k, grid, "multi-mode wavenumber")
        u = ic.amplitude * np.sum(
            np.exp(1j * np.outer(ic.wavenumbers, x)), axis=0
        )
    else:
        raise TypeError(f"unknown initial condition type {type(ic).__name__}")
    if ic.perturbation is not None:
        _check_mode(ic.perturbation.mode, grid, "perturbation mode")
        u = u + ic.perturbation.amplitude * np.exp(1j * ic.perturbation.mode * x)
    return Field(grid, u)


def ellipticity_indicator(f: Field) -> tuple[np.ndarray, float]:
    """Nodewise 1 - 2|u|^2 and its minimum.

    A negative minimum marks a region where the linearized principal symbol
    loses ellipticity (amplitude above sqrt(2)/2), the precursor of the
    backward-heat style instability.
    """
    ind = 1.0 - 2.0 * (f.values.real**2 + f.values.imag**2)
    return ind, float(ind.min())


def pde_residual(model: ModelSpec, a: float, k: int, grid: GridSpec) -> float:
    """L2 residual of the wave train inserted into the discretized equation.

    For the exact dispersion relation omega = k^2 + a^2 the residual is
    roundoff-level; used as a cross-check of potential_field and the
    dispersion convention.
    """
    u = exact_plane_wave(a, k, 0.0, grid)
    omega = k * k + a * a
    rhs = (
        -spectral_derivative(u, 2).values
        + potential_field(model, u) * u.values
    )
    diff = Field(grid, rhs - omega * u.values)
    return l2_norm(diff)
