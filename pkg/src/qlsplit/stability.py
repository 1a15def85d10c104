"""Closed-form plane-wave linear stability and split-step mode growth.

Perturbing a wave train a*exp(i(kx - omega t)) by a relative disturbance
at integer wavenumber xi couples the pair (eps_hat_xi, conj(eps_hat_-xi))
through a 2x2 constant matrix.  Its eigenvalues decide modulational
stability; the sufficient stability threshold is |a| <= sqrt(2)/2.

All closed forms are evaluated in extended precision internally so that
they can be compared against a direct numeric eigensolve at tight
absolute tolerances even when the eigenvalues are O(10^4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PlaneWaveLinearization",
    "ModeGrowth",
    "SplitStepMultipliers",
    "AmplitudeVerdict",
    "gn_matrix",
    "gn_eigenvalues",
    "two_by_two_eigenvalues",
    "stability_threshold_scan",
    "split_step_mode_growth",
    "split_step_update_matrix",
]


@dataclass(frozen=True)
class PlaneWaveLinearization:
    """Carrier amplitude a >= 0, carrier wavenumber k, perturbation wavenumber xi."""

    a: float
    k: int
    xi: int

    def __post_init__(self) -> None:
        if self.a < 0:
            raise ValueError(f"carrier amplitude must be nonnegative, got {self.a}")


@dataclass(frozen=True)
class ModeGrowth:
    """Eigenvalue pair of the perturbation system and the growth verdict."""

    lambda_plus: complex
    lambda_minus: complex
    unstable: bool


@dataclass(frozen=True)
class SplitStepMultipliers:
    """Per-step multipliers of a frozen-coefficient split-step mode."""

    multiplier_plus: complex
    multiplier_minus: complex
    growing: bool


@dataclass(frozen=True)
class AmplitudeVerdict:
    """Scan result for one carrier amplitude over a range of xi."""

    amplitude: float
    unstable: bool
    worst_xi: int | None
    growth_rate: float


def gn_matrix(lin: PlaneWaveLinearization, dtype=np.complex128) -> np.ndarray:
    """2x2 coefficient matrix of the coupled perturbation pair.

    Accepts a complex dtype so callers can build the matrix in extended
    precision for high-accuracy eigenvalue cross-checks.
    """
    real_type = np.zeros(1, dtype=dtype).real.dtype.type
    a2 = real_type(lin.a) ** 2
    xi = real_type(lin.xi)
    k = real_type(lin.k)
    xi2 = xi * xi
    m = np.array(
        [
            [-2 * k * xi - xi2 - a2 + a2 * xi2, -a2 + a2 * xi2],
            [a2 - a2 * xi2, -2 * k * xi + xi2 + a2 - a2 * xi2],
        ],
        dtype=dtype,
    )
    return 1j * m


def _discriminant(lin: PlaneWaveLinearization, real_dtype=np.longdouble):
    """xi^2 * (2 a^2 xi^2 - 2 a^2 - xi^2), the radicand of the closed form."""
    a2 = real_dtype(lin.a) ** 2
    xi2 = real_dtype(lin.xi) ** 2
    return 2 * a2 * xi2 - 2 * a2 - xi2


def gn_eigenvalues(lin: PlaneWaveLinearization) -> ModeGrowth:
    """Closed-form eigenvalues -2ik*xi +/- |xi| sqrt(2a^2 xi^2 - 2a^2 - xi^2).

    The radicand is evaluated in extended precision before the principal
    square root is taken; the verdict is unstable exactly when the radicand
    is positive (equivalently, some eigenvalue has positive real part).
    """
    r = _discriminant(lin)
    root = np.sqrt(np.clongdouble(r))
    xi_abs = np.longdouble(abs(lin.xi))
    doppler = np.clongdouble(-2j) * np.longdouble(lin.k) * np.longdouble(lin.xi)
    lam_p = complex(doppler + xi_abs * root)
    lam_m = complex(doppler - xi_abs * root)
    return ModeGrowth(lambda_plus=lam_p, lambda_minus=lam_m, unstable=bool(r > 0))


def two_by_two_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Direct eigensolve of a 2x2 matrix via the quadratic formula.

    Uses the balanced discriminant ((m00 - m11)/2)^2 + m01*m10 and
    preserves the input dtype, so it can serve as an extended-precision
    oracle for closed-form eigenvalues.
    """
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    half_trace = (m[0, 0] + m[1, 1]) / 2
    disc = np.sqrt(((m[0, 0] - m[1, 1]) / 2) ** 2 + m[0, 1] * m[1, 0])
    return np.array([half_trace + disc, half_trace - disc], dtype=m.dtype)


def stability_threshold_scan(
    a_grid, xi_max: int, carrier_wavenumber: int = 0
) -> list[AmplitudeVerdict]:
    """Evaluate the modewise instability condition for each amplitude.

    For every amplitude, checks xi = 1..xi_max and reports whether any
    mode grows, the fastest-growing xi, and its growth rate max Re(lambda).
    The carrier wavenumber only Doppler-shifts Im(lambda) and never
    changes the verdict.
    """
    if xi_max < 1:
        raise ValueError(f"xi_max must be >= 1, got {xi_max}")
    out = []
    for a in a_grid:
        worst_xi = None
        worst_rate = 0.0
        for xi in range(1, xi_max + 1):
            lin = PlaneWaveLinearization(a=float(a), k=carrier_wavenumber, xi=xi)
            growth = gn_eigenvalues(lin)
            if growth.unstable:
                rate = max(growth.lambda_plus.real, growth.lambda_minus.real)
                if rate > worst_rate:
                    worst_rate = rate
                    worst_xi = xi
        out.append(
            AmplitudeVerdict(
                amplitude=float(a),
                unstable=worst_xi is not None,
                worst_xi=worst_xi,
                growth_rate=worst_rate,
            )
        )
    return out


def split_step_mode_growth(
    w_amplitude: float, tau: float, k: int
) -> SplitStepMultipliers:
    """Per-step multipliers 1 +/- tau k^2 sqrt(2|w|^2 - 1) of a frozen mode.

    Real pair (exponential growth flagged) when 2|w|^2 > 1; complex
    conjugate pair on the stable side.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    radicand = 2.0 * w_amplitude * w_amplitude - 1.0
    root = np.sqrt(complex(radicand))
    shift = tau * float(k) ** 2 * root
    return SplitStepMultipliers(
        multiplier_plus=complex(1.0 + shift),
        multiplier_minus=complex(1.0 - shift),
        growing=bool(radicand > 0),
    )


def split_step_update_matrix(
    w1: float, w2: float, tau: float, k: int
) -> np.ndarray:
    """Explicit one-step update matrix of the frozen-coefficient mode.

    I + tau k^2 [[-2 w1 w2, -(2 w2^2 - 1)], [2 w1^2 - 1, 2 w1 w2]]; its
    eigenvalues are the split_step_mode_growth multipliers for
    |w|^2 = w1^2 + w2^2.
    """
    c = tau * float(k) ** 2
    return np.eye(2) + c * np.array(
        [
            [-2 * w1 * w2, -(2 * w2 * w2 - 1.0)],
            [2 * w1 * w1 - 1.0, 2 * w1 * w2],
        ]
    )
