"""Strang splitting stepper, simulation driver, and blow-up guard.

One step of size tau advances the state through

    half free flight -> nonlinear phase kick -> half free flight

optionally with a frequency cutoff (mollified variant) inside the phase
kick and after it, and a Krasny floor filter after the second half
flight.  The scheme is explicit, symmetric, and conserves the discrete
mass exactly (up to roundoff) when both filters are off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import diagnostics
from .model import (
    InitialCondition,
    ModelSpec,
    build_initial_condition,
    potential_field,
)
from .spectral import (
    Field,
    GridSpec,
    _mollifier_weights,
    apply_mollifier,
    mollifier_cutoff,
)

__all__ = [
    "StepperConfig",
    "BlowupReport",
    "SimulationRecord",
    "StabilityAdvisory",
    "nonlinear_phase_step",
    "strang_step",
    "run_simulation",
    "stability_advisory",
]


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping parameters.

    ``tau`` is the step size (negative values are accepted so that a single
    backward step can be taken in reversibility checks; the simulation
    driver itself requires tau > 0).  ``mollify_eps`` switches on the
    frequency cutoff at |k| <= floor(1/eps); ``krasny_delta`` switches on
    the relative spectral floor filter.

    The blow-up guard trips when the maximum amplitude exceeds
    ``blowup_factor`` times its initial value or any sample turns
    non-finite.  ``energy_guard_factor`` optionally adds an instability
    trigger on the conserved energy: the run halts when, on a record
    stride, |E(t) - E(0)| exceeds the factor times (|E(0)| + M(0)).  This
    catches spectral-pollution instabilities that scramble the field
    without raising its amplitude (mass conservation bounds max|u| by
    sqrt(N M / 2 pi), which dispersing profiles never approach).
    """

    tau: float
    mollify_eps: float | None = None
    krasny_delta: float | None = None
    dealias: bool = False
    blowup_factor: float = 10.0
    energy_guard_factor: float | None = None
    record_every: int = 100
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.tau == 0.0 or not np.isfinite(self.tau):
            raise ValueError(f"tau must be a finite nonzero step, got {self.tau}")
        if self.mollify_eps is not None and self.mollify_eps <= 0:
            raise ValueError(f"mollify_eps must be positive, got {self.mollify_eps}")
        if self.krasny_delta is not None and not 0.0 < self.krasny_delta < 1.0:
            raise ValueError(
                f"krasny_delta must lie in (0, 1), got {self.krasny_delta}"
            )
        if self.blowup_factor <= 1.0:
            raise ValueError(
                f"blowup_factor must exceed 1, got {self.blowup_factor}"
            )
        if self.energy_guard_factor is not None and self.energy_guard_factor <= 0:
            raise ValueError(
                f"energy_guard_factor must be positive, got {self.energy_guard_factor}"
            )
        if self.record_every < 1:
            raise ValueError(
                f"record_every must be a positive integer, got {self.record_every}"
            )
        object.__setattr__(
            self, "snapshot_times", tuple(float(t) for t in self.snapshot_times)
        )


@dataclass(frozen=True)
class BlowupReport:
    """First guard trip of a run: when, why, and the field at that moment."""

    onset_time: float
    trigger: str  # "amplitude" | "nonfinite" | "energy"
    final_field: Field


@dataclass
class SimulationRecord:
    """Diagnostics time series plus optional snapshots and blow-up report."""

    times: np.ndarray
    max_amplitude: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    min_ellipticity: np.ndarray
    final_field: Field
    snapshots: list[tuple[float, Field]] = field(default_factory=list)
    blowup: BlowupReport | None = None

    @property
    def blew_up(self) -> bool:
        return self.blowup is not None


@dataclass(frozen=True)
class StabilityAdvisory:
    """tau / eps^(5/2) ratio with a warning flag when it exceeds 1."""

    ratio: float
    warn: bool


class _StepKernel:
    """Tables and scratch-free inner loop for repeated Strang steps.

    Operates on raw (unnormalized) FFT arrays; all per-step operations are
    either diagonal in k or pointwise in x, so normalization and the
    node-origin phase drop out.
    """

    def __init__(
        self,
        grid: GridSpec,
        model: ModelSpec,
        tau: float,
        mollify_eps: float | None = None,
        krasny_delta: float | None = None,
        dealias: bool = False,
    ) -> None:
        self.grid = grid
        self.model = model
        self.tau = tau
        self.k2 = grid._k_squared
        self.half_kick = np.exp(-1j * self.k2 * (tau / 2.0))
        self.moll_weights = None
        if mollify_eps is not None:
            self.moll_weights = _mollifier_weights(
                grid, mollifier_cutoff(mollify_eps), taper=False
            )
        if dealias:
            mask = (np.abs(grid._k_float) <= grid.n_points // 3).astype(np.float64)
            self.moll_weights = mask if self.moll_weights is None else mask * self.moll_weights
        self.krasny_delta = krasny_delta

    def potential(self, s: np.ndarray) -> np.ndarray:
        """f(s) + sign * g'(s) * (g(s))_xx with s = |u|^2 on the nodes."""
        m = self.model
        v = P.polyval(s, m.f_coeffs)
        if m.quasilinear_sign != 0:
            lap = np.fft.ifft(-self.k2 * np.fft.fft(P.polyval(s, m.g_coeffs))).real
            v = v + m.quasilinear_sign * P.polyval(s, m.gprime_coeffs) * lap
        if self.moll_weights is not None:
            v = np.fft.ifft(self.moll_weights * np.fft.fft(v)).real
        return v

    def advance(self, f_raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One Strang step on a raw spectrum; returns (spectrum, state)."""
        u_mid = np.fft.ifft(f_raw * self.half_kick)
        s = u_mid.real**2 + u_mid.imag**2
        u_mid *= np.exp(-1j * self.tau * self.potential(s))
        f_new = np.fft.fft(u_mid)
        if self.moll_weights is not None:
            f_new *= self.moll_weights
        f_new *= self.half_kick
        if self.krasny_delta is not None:
            mags = np.abs(f_new)
            peak = mags.max()
            if peak > 0.0:
                f_new[mags < self.krasny_delta * peak] = 0.0
        return f_new, np.fft.ifft(f_new)


def nonlinear_phase_step(
    model: ModelSpec, f: Field, tau: float, mollify_eps: float | None = None
) -> Field:
    """Exact flow of the nonlinear sub-equation: u -> u * exp(-i tau V[u]).

    The potential V is frozen at the input amplitude (which the flow itself
    conserves nodewise), so the map is a pure pointwise phase rotation.
    With ``mollify_eps`` set, the frequency cutoff is applied to V.
    """
    v = potential_field(model, f)
    if mollify_eps is not None:
        v = apply_mollifier(Field(f.grid, v), mollify_eps).values.real
    return Field(f.grid, f.values * np.exp(-1j * tau * v))


def strang_step(model: ModelSpec, f: Field, cfg: StepperConfig) -> Field:
    """One symmetric split step of size cfg.tau.

    Composition: free flight tau/2, nonlinear phase kick tau (with the
    cutoff applied to the potential and then to the state when mollified),
    free flight tau/2, then the Krasny filter when enabled.
    """
    kernel = _StepKernel(
        f.grid, model, cfg.tau, cfg.mollify_eps, cfg.krasny_delta, cfg.dealias
    )
    _, u_new = kernel.advance(np.fft.fft(f.values))
    return Field(f.grid, u_new)


def stability_advisory(tau: float, eps: float) -> StabilityAdvisory:
    """Step-size advisory for the mollified scheme: warn when tau > eps^(5/2).

    Informational only; the constant in front of eps^(5/2) is taken as 1.
    """
    if tau <= 0 or eps <= 0:
        raise ValueError("tau and eps must be positive")
    ratio = tau / eps**2.5
    return StabilityAdvisory(ratio=float(ratio), warn=bool(ratio > 1.0))


def run_simulation(
    model: ModelSpec,
    ic: InitialCondition | Field,
    grid: GridSpec,
    cfg: StepperConfig,
    t_final: float,
) -> SimulationRecord:
    """March the Strang scheme to t_final, recording diagnostics.

    Diagnostics (t, max amplitude, mass, energy, ellipticity minimum) are
    recorded at t = 0, every ``cfg.record_every`` steps, and at the end.
    The run halts early with a ``BlowupReport`` as soon as the maximum
    amplitude exceeds ``cfg.blowup_factor`` times its initial value or any
    sample turns non-finite; with ``cfg.energy_guard_factor`` set, an
    energy-drift trip on a record stride halts it as well.

    ``t_final`` must be an exact integer multiple of ``cfg.tau``.
    """
    if cfg.tau <= 0:
        raise ValueError("run_simulation requires tau > 0")
    if t_final <= 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    ratio = t_final / cfg.tau
    n_steps = int(round(ratio))
    if n_steps < 1 or abs(ratio - n_steps) > 1e-8 * max(1.0, abs(ratio)):
        raise ValueError(
            f"t_final = {t_final} is not an integer multiple of tau = {cfg.tau}"
        )

    u0 = ic if isinstance(ic, Field) else build_initial_condition(ic, grid)
    if u0.grid.n_points != grid.n_points:
        raise ValueError("initial field does not live on the requested grid")
    if not np.isfinite(u0.values).all():
        raise ValueError("initial data contains non-finite samples")

    snap_steps: dict[int, float] = {}
    for ts in cfg.snapshot_times:
        idx = int(round(ts / cfg.tau))
        if not 0 <= idx <= n_steps:
            raise ValueError(f"snapshot time {ts} outside the run [0, {t_final}]")
        snap_steps[idx] = ts

    kernel = _StepKernel(
        grid, model, cfg.tau, cfg.mollify_eps, cfg.krasny_delta, cfg.dealias
    )

    times: list[float] = []
    amps: list[float] = []
    masses: list[float] = []
    energies: list[float] = []
    ellipticities: list[float] = []
    snapshots: list[tuple[float, Field]] = []
    blowup: BlowupReport | None = None

    def record(t: float, u: np.ndarray, amp: float) -> float:
        fld = Field(grid, u)
        times.append(t)
        amps.append(amp)
        masses.append(diagnostics.mass(fld))
        e = diagnostics.energy(fld, model)
        energies.append(e)
        # min_j (1 - 2|u_j|^2) = 1 - 2 max_j |u_j|^2
        ellipticities.append(1.0 - 2.0 * amp * amp)
        return e

    amp0 = float(np.abs(u0.values).max())
    threshold = cfg.blowup_factor * amp0
    energy0 = record(0.0, u0.values, amp0)
    energy_threshold = None
    if cfg.energy_guard_factor is not None:
        energy_threshold = cfg.energy_guard_factor * (abs(energy0) + masses[0])
    if 0 in snap_steps:
        snapshots.append((0.0, u0))

    f_raw = np.fft.fft(u0.values)
    u = u0.values
    for n in range(1, n_steps + 1):
        f_raw, u = kernel.advance(f_raw)
        t = n * cfg.tau
        amp = float(np.abs(u).max())
        trigger = None
        if not np.isfinite(amp):
            trigger = "nonfinite"
        elif amp > threshold:
            trigger = "amplitude"
        if trigger is not None or n % cfg.record_every == 0 or n == n_steps:
            e = record(t, u, amp)
            if (
                trigger is None
                and energy_threshold is not None
                and (not np.isfinite(e) or abs(e - energy0) > energy_threshold)
            ):
                trigger = "energy"
        if n in snap_steps:
            snapshots.append((t, Field(grid, u)))
        if trigger is not None:
            blowup = BlowupReport(
                onset_time=t, trigger=trigger, final_field=Field(grid, u)
            )
            break

    return SimulationRecord(
        times=np.asarray(times),
        max_amplitude=np.asarray(amps),
        mass=np.asarray(masses),
        energy=np.asarray(energies),
        min_ellipticity=np.asarray(ellipticities),
        final_field=Field(grid, u),
        snapshots=snapshots,
        blowup=blowup,
    )
