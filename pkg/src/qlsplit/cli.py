"""Command-line front end: experiment configs, runners, and file writers.

A single flat JSON document describes an experiment; every field can be
overridden from the command line.  Four subcommands map onto the four
experiment kinds:

    qlsplit simulate        one run, diagnostics CSV (+ snapshots, blow-up JSON)
    qlsplit converge        step-size ladder vs a fine reference, error table
    qlsplit stability       plane-wave threshold scan, verdict CSV
    qlsplit planewave-check exactness and perturbation growth on a wave train

Exit codes: 0 success, 2 configuration error, 3 run halted by the blow-up
guard, 4 reference-run failure in a convergence study.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .diagnostics import ConvergenceRow, ConvergenceTable, fit_order, mass
from .model import (
    Gaussian,
    InitialCondition,
    ModelSpec,
    MultiMode,
    Perturbation,
    PlaneWave,
)
from .spectral import Field, GridSpec, h1_seminorm, l2_norm
from .splitting import SimulationRecord, StepperConfig, _StepKernel, run_simulation
from .stability import split_step_mode_growth, stability_threshold_scan

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "serialize_config",
    "cmd_simulate",
    "cmd_converge",
    "cmd_stability",
    "cmd_planewave_check",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_REFERENCE = 4

WORKERS_ENV = "QLSPLIT_WORKERS"

_MODELS = {
    "pseudo_attractive": ModelSpec.pseudo_attractive,
    "thin_film": ModelSpec.thin_film,
    "cubic": ModelSpec.cubic_nls,
}

_EXPERIMENTS = ("simulate", "converge", "stability", "planewave_check")
_IC_KINDS = ("gaussian", "plane_wave", "multi_mode")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of one experiment; JSON keys mirror field names."""

    experiment: str = "simulate"
    model: str = "pseudo_attractive"
    n_points: int = 256
    ic_kind: str = "gaussian"
    amplitude: float = 0.2
    width: float | None = 0.2
    wavenumber: int | None = None
    wavenumbers: tuple[int, ...] | None = None
    perturbation_mode: int | None = None
    perturbation_amplitude: float = 1e-10
    t_final: float = 0.7853981633974483
    tau: float | None = None
    n_steps: int | None = 1000
    mollify_eps: float | None = None
    krasny_delta: float | None = None
    dealias: bool = False
    blowup_factor: float = 10.0
    energy_guard_factor: float | None = None
    record_every: int = 100
    snapshot_times: tuple[float, ...] = ()
    output: str = "qlsplit_run"
    nt_ladder: tuple[int, ...] | None = None
    reference_n_steps: int | None = None
    amplitude_grid: tuple[float, ...] | None = None
    xi_max: int = 128
    growth_tau: float | None = None
    growth_wavenumbers: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("wavenumbers", "snapshot_times", "nt_ladder",
                     "amplitude_grid", "growth_wavenumbers"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(v))


def serialize_config(cfg: ExperimentConfig) -> str:
    d = dataclasses.asdict(cfg)
    for key, value in d.items():
        if isinstance(value, tuple):
            d[key] = list(value)
    return json.dumps(d, indent=2, sort_keys=True)


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in _EXPERIMENTS:
        raise ConfigError(f"unknown experiment kind {cfg.experiment!r}")
    if cfg.model not in _MODELS:
        raise ConfigError(
            f"unknown model {cfg.model!r}; choose from {sorted(_MODELS)}"
        )
    if cfg.ic_kind not in _IC_KINDS:
        raise ConfigError(f"unknown ic_kind {cfg.ic_kind!r}")
    if cfg.t_final <= 0:
        raise ConfigError(f"t_final must be positive, got {cfg.t_final}")
    if cfg.experiment in ("simulate", "planewave_check") and (
        (cfg.tau is None) == (cfg.n_steps is None)
    ):
        raise ConfigError("exactly one of tau or n_steps must be given with t_final")
    if cfg.experiment == "converge" and cfg.tau is not None:
        raise ConfigError(
            "converge derives the step size from nt_ladder entries; leave tau unset"
        )
    out_dir = os.path.dirname(os.path.abspath(cfg.output))
    if not os.path.isdir(out_dir) or not os.access(out_dir, os.W_OK):
        raise ConfigError(f"output directory {out_dir!r} is not writable")


def _resolve_tau(cfg: ExperimentConfig) -> float:
    if cfg.tau is not None:
        return float(cfg.tau)
    if cfg.n_steps is None or cfg.n_steps < 1:
        raise ConfigError(f"n_steps must be a positive integer, got {cfg.n_steps}")
    return cfg.t_final / cfg.n_steps


def _build_model(cfg: ExperimentConfig) -> ModelSpec:
    return _MODELS[cfg.model]()


def _build_ic(cfg: ExperimentConfig) -> InitialCondition:
    pert = None
    if cfg.perturbation_mode is not None:
        pert = Perturbation(
            mode=int(cfg.perturbation_mode),
            amplitude=float(cfg.perturbation_amplitude),
        )
    try:
        if cfg.ic_kind == "gaussian":
            if cfg.width is None:
                raise ConfigError("gaussian initial condition requires width")
            return Gaussian(cfg.amplitude, cfg.width, perturbation=pert)
        if cfg.ic_kind == "plane_wave":
            if cfg.wavenumber is None:
                raise ConfigError("plane_wave initial condition requires wavenumber")
            return PlaneWave(cfg.amplitude, int(cfg.wavenumber), perturbation=pert)
        if cfg.wavenumbers is None:
            raise ConfigError("multi_mode initial condition requires wavenumbers")
        return MultiMode(cfg.amplitude, cfg.wavenumbers, perturbation=pert)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_stepper(cfg: ExperimentConfig, tau: float,
                   record_every: int | None = None) -> StepperConfig:
    try:
        return StepperConfig(
            tau=tau,
            mollify_eps=cfg.mollify_eps,
            krasny_delta=cfg.krasny_delta,
            dealias=cfg.dealias,
            blowup_factor=cfg.blowup_factor,
            energy_guard_factor=cfg.energy_guard_factor,
            record_every=record_every if record_every is not None else cfg.record_every,
            snapshot_times=cfg.snapshot_times,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _run_once(cfg: ExperimentConfig, n_steps: int,
              record_every: int | None = None) -> SimulationRecord:
    grid = GridSpec(cfg.n_points)
    tau = cfg.t_final / n_steps
    stepper = _build_stepper(cfg, tau, record_every)
    try:
        return run_simulation(
            _build_model(cfg), _build_ic(cfg), grid, stepper, cfg.t_final
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_diagnostics_csv(path: str, rec: SimulationRecord) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "max_amp", "mass", "energy", "min_ellipticity"])
        for row in zip(rec.times, rec.max_amplitude, rec.mass, rec.energy,
                       rec.min_ellipticity):
            writer.writerow([repr(float(v)) for v in row])


def _write_snapshot_csv(path: str, fld: Field) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_u", "im_u", "abs_u"])
        for x, u in zip(fld.grid.nodes, fld.values):
            writer.writerow([repr(float(x)), repr(u.real), repr(u.imag),
                             repr(abs(u))])


def cmd_simulate(cfg: ExperimentConfig) -> int:
    """Run one simulation; write diagnostics, snapshots, blow-up sidecar."""
    tau = _resolve_tau(cfg)
    grid = GridSpec(cfg.n_points)
    stepper = _build_stepper(cfg, tau)
    try:
        rec = run_simulation(
            _build_model(cfg), _build_ic(cfg), grid, stepper, cfg.t_final
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _write_diagnostics_csv(cfg.output + ".csv", rec)
    for i, (t, fld) in enumerate(rec.snapshots):
        _write_snapshot_csv(f"{cfg.output}_snapshot_{i:03d}.csv", fld)
    if rec.blowup is not None:
        sidecar = {
            "onset_time": rec.blowup.onset_time,
            "trigger": rec.blowup.trigger,
            "blowup_factor": cfg.blowup_factor,
            "t_final_requested": cfg.t_final,
        }
        with open(cfg.output + "_blowup.json", "w") as fh:
            json.dump(sidecar, fh, indent=2)
        print(
            f"blow-up halt at t = {rec.blowup.onset_time:.6e} "
            f"({rec.blowup.trigger}); diagnostics in {cfg.output}.csv"
        )
        return EXIT_BLOWUP
    print(f"completed t = {cfg.t_final:g}; diagnostics in {cfg.output}.csv")
    return EXIT_OK


def _ladder_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


def cmd_converge(cfg: ExperimentConfig) -> int:
    """Run a step-count ladder against a fine reference; fit the order."""
    if not cfg.nt_ladder:
        raise ConfigError("converge requires nt_ladder")
    if cfg.reference_n_steps is None:
        raise ConfigError("converge requires reference_n_steps")
    ladder = sorted(int(n) for n in cfg.nt_ladder)
    if len(set(ladder)) != len(ladder) or ladder[0] < 1:
        raise ConfigError(f"nt_ladder entries must be distinct positive, got {ladder}")
    if cfg.reference_n_steps <= ladder[-1]:
        raise ConfigError(
            "reference_n_steps must exceed every ladder entry "
            f"({cfg.reference_n_steps} <= {ladder[-1]})"
        )

    runs = ladder + [int(cfg.reference_n_steps)]
    workers = min(_ladder_workers(), len(runs))
    results: dict[int, SimulationRecord] = {}
    if workers == 1:
        for n in runs:
            results[n] = _run_once(cfg, n, record_every=n)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                n: pool.submit(_run_once, cfg, n, n) for n in runs
            }
            results = {n: fut.result() for n, fut in futures.items()}

    reference = results[cfg.reference_n_steps]
    if reference.blew_up:
        print(
            f"reference run (n_steps={cfg.reference_n_steps}) tripped the "
            f"blow-up guard at t = {reference.blowup.onset_time:.6e}; "
            "no convergence table produced",
            file=sys.stderr,
        )
        return EXIT_REFERENCE

    rows = []
    ok_rows = []
    for n in ladder:
        rec = results[n]
        if rec.blew_up:
            rows.append((n, None, None, "unstable"))
            continue
        diff = Field(
            reference.final_field.grid,
            rec.final_field.values - reference.final_field.values,
        )
        err_l2 = l2_norm(diff)
        err_h1 = h1_seminorm(diff)
        rows.append((n, err_l2, err_h1, "ok"))
        ok_rows.append(ConvergenceRow(n, err_l2, err_h1))

    with open(cfg.output + "_table.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_steps", "err_l2", "err_h1", "status"])
        for n, e2, e1, status in rows:
            writer.writerow(
                [n, "" if e2 is None else repr(e2),
                 "" if e1 is None else repr(e1), status]
            )

    orders = None
    notice = None
    roundoff_floor = 1e-13
    if ok_rows and all(r.err_l2 < roundoff_floor for r in ok_rows):
        notice = "errors at roundoff level; order fit skipped"
    elif len(ok_rows) >= 3:
        table = ConvergenceTable(cfg.t_final, tuple(ok_rows))
        orders = fit_order(table)
    else:
        notice = f"only {len(ok_rows)} stable rows; order fit needs 3"

    summary = {
        "t_final": cfg.t_final,
        "reference_n_steps": cfg.reference_n_steps,
        "order_l2": None if orders is None else orders[0],
        "order_h1": None if orders is None else orders[1],
        "notice": notice,
        "rows": [
            {"n_steps": n, "err_l2": e2, "err_h1": e1, "status": status}
            for n, e2, e1, status in rows
        ],
        "filters": {
            "mollify_eps": cfg.mollify_eps,
            "krasny_delta": cfg.krasny_delta,
            "dealias": cfg.dealias,
        },
    }
    with open(cfg.output + "_orders.json", "w") as fh:
        json.dump(summary, fh, indent=2)

    if orders is not None:
        print(
            f"fitted orders: L2 {orders[0]:.3f}, H1 {orders[1]:.3f}; "
            f"table in {cfg.output}_table.csv"
        )
    else:
        print(f"{notice}; table in {cfg.output}_table.csv")
    return EXIT_OK


def cmd_stability(cfg: ExperimentConfig) -> int:
    """Scan carrier amplitudes for modewise instability; optional multipliers."""
    if not cfg.amplitude_grid:
        raise ConfigError("stability requires amplitude_grid")
    if cfg.xi_max < 1:
        raise ConfigError(f"xi_max must be >= 1, got {cfg.xi_max}")
    verdicts = stability_threshold_scan(cfg.amplitude_grid, cfg.xi_max)
    with open(cfg.output + "_stability.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["amplitude", "unstable", "worst_xi", "growth_rate"])
        for v in verdicts:
            writer.writerow(
                [repr(v.amplitude), int(v.unstable),
                 "" if v.worst_xi is None else v.worst_xi, repr(v.growth_rate)]
            )
    if cfg.growth_tau is not None and cfg.growth_wavenumbers:
        with open(cfg.output + "_multipliers.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["w", "tau", "k", "mult_plus_re", "mult_plus_im",
                 "mult_minus_re", "mult_minus_im", "growing"]
            )
            for w in cfg.amplitude_grid:
                for k in cfg.growth_wavenumbers:
                    g = split_step_mode_growth(w, cfg.growth_tau, int(k))
                    writer.writerow(
                        [repr(float(w)), repr(cfg.growth_tau), int(k),
                         repr(g.multiplier_plus.real), repr(g.multiplier_plus.imag),
                         repr(g.multiplier_minus.real), repr(g.multiplier_minus.imag),
                         int(g.growing)]
                    )
    n_unstable = sum(v.unstable for v in verdicts)
    print(
        f"{len(verdicts)} amplitudes scanned, {n_unstable} unstable; "
        f"report in {cfg.output}_stability.csv"
    )
    return EXIT_OK


def planewave_deviation(
    a: float,
    k: int,
    tau: float,
    n_steps: int,
    grid: GridSpec,
    model: ModelSpec | None = None,
    perturbation: Perturbation | None = None,
) -> tuple[float, float]:
    """March a (possibly perturbed) wave train and track its deviation.

    Returns (max L2 deviation from the exact wave train over all steps,
    growth factor of the squared-L2 perturbation energy relative to t=0).
    For an unperturbed start the growth factor is reported as the ratio to
    the first step's deviation energy (the initial energy is zero).
    """
    if model is None:
        model = ModelSpec.pseudo_attractive()
    x = grid.nodes
    u0 = a * np.exp(1j * k * x)
    if perturbation is not None:
        u0 = u0 + perturbation.amplitude * np.exp(1j * perturbation.mode * x)
    fld0 = Field(grid, u0)
    omega = k * k + a * a
    energy0 = mass(Field(grid, u0 - a * np.exp(1j * k * x)))

    kernel = _StepKernel(grid, model, tau)
    f_raw = np.fft.fft(fld0.values)
    max_dev = 0.0
    max_energy = energy0
    first_energy = None
    for n in range(1, n_steps + 1):
        f_raw, u = kernel.advance(f_raw)
        exact = a * np.exp(1j * (k * x - omega * n * tau))
        dev_field = Field(grid, u - exact)
        dev = l2_norm(dev_field)
        max_dev = max(max_dev, dev)
        energy = dev * dev
        if first_energy is None:
            first_energy = energy
        max_energy = max(max_energy, energy)
        if not np.isfinite(dev):
            break
    base = energy0 if energy0 > 0 else first_energy
    growth = max_energy / base if base and base > 0 else float("inf")
    return max_dev, float(growth)


def cmd_planewave_check(cfg: ExperimentConfig) -> int:
    """Measure split-step exactness on a wave train, plus perturbed growth."""
    if cfg.wavenumber is None:
        raise ConfigError("planewave_check requires wavenumber")
    tau = _resolve_tau(cfg)
    n_steps = cfg.n_steps if cfg.n_steps is not None else int(
        round(cfg.t_final / tau)
    )
    grid = GridSpec(cfg.n_points)
    k = int(cfg.wavenumber)
    model = _build_model(cfg)

    max_dev, _ = planewave_deviation(cfg.amplitude, k, tau, n_steps, grid, model)
    pert_mode = cfg.perturbation_mode if cfg.perturbation_mode is not None else k + 1
    pert = Perturbation(mode=int(pert_mode), amplitude=cfg.perturbation_amplitude)
    _, growth = planewave_deviation(
        cfg.amplitude, k, tau, n_steps, grid, model, perturbation=pert
    )

    report = {
        "amplitude": cfg.amplitude,
        "wavenumber": k,
        "tau": tau,
        "n_steps": n_steps,
        "max_l2_deviation": max_dev,
        "perturbation_mode": int(pert_mode),
        "perturbation_amplitude": cfg.perturbation_amplitude,
        "perturbation_energy_growth": growth,
    }
    with open(cfg.output + "_planewave.json", "w") as fh:
        json.dump(report, fh, indent=2)
    print(
        f"max L2 deviation {max_dev:.3e}; perturbation energy growth "
        f"{growth:.3e}; report in {cfg.output}_planewave.json"
    )
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "stability": cmd_stability,
    "planewave_check": cmd_planewave_check,
}

_INT_FIELDS = {"n_points", "wavenumber", "perturbation_mode", "n_steps",
               "record_every", "reference_n_steps", "xi_max"}
_FLOAT_FIELDS = {"amplitude", "width", "perturbation_amplitude", "t_final",
                 "tau", "mollify_eps", "krasny_delta", "blowup_factor",
                 "energy_guard_factor", "growth_tau"}
_INT_LIST_FIELDS = {"wavenumbers", "nt_ladder", "growth_wavenumbers"}
_FLOAT_LIST_FIELDS = {"snapshot_times", "amplitude_grid"}
_BOOL_FIELDS = {"dealias"}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean flag value, got {raw!r}")


def _add_override_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a JSON experiment config")
    skip = {"experiment"}
    for f in dataclasses.fields(ExperimentConfig):
        if f.name in skip:
            continue
        flag = "--" + f.name.replace("_", "-")
        if f.name in _INT_LIST_FIELDS or f.name in _FLOAT_LIST_FIELDS:
            parser.add_argument(flag, default=None,
                                help=f"comma-separated override for {f.name}")
        elif f.name in _BOOL_FIELDS:
            parser.add_argument(flag, default=None,
                                help=f"true/false override for {f.name}")
        elif f.name in _INT_FIELDS:
            parser.add_argument(flag, type=int, default=None)
        elif f.name in _FLOAT_FIELDS:
            parser.add_argument(flag, type=float, default=None)
        else:
            parser.add_argument(flag, default=None)


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    updates = {}
    for f in dataclasses.fields(ExperimentConfig):
        if f.name == "experiment":
            continue
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name in _INT_LIST_FIELDS:
            value = tuple(int(v) for v in str(value).split(",") if v != "")
        elif f.name in _FLOAT_LIST_FIELDS:
            value = tuple(float(v) for v in str(value).split(",") if v != "")
        elif f.name in _BOOL_FIELDS:
            value = _parse_bool(str(value))
        updates[f.name] = value
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlsplit",
        description="Split-step solver and stability toolkit for 1D periodic "
        "quasilinear Schrodinger equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in ("simulate", "converge", "stability", "planewave-check"):
        p = sub.add_parser(command)
        _add_override_args(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    experiment = args.command.replace("-", "_")
    try:
        if args.config is not None:
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = ExperimentConfig()
        cfg = _apply_overrides(cfg, args)
        cfg = dataclasses.replace(cfg, experiment=experiment)
        _validate(cfg)
        return _COMMANDS[experiment](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
