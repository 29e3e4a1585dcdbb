"""Protocol execution: configuration, single runs, sweeps, decompositions.

A run prepares the initial pair state, integrates the schedule, evaluates
the observable time series on the snapshot stride and writes delimited
outputs plus a JSON summary (and figures, see sapsim.report) into the
output directory. Sweeps fan runs out over a worker pool, one point per
interaction energy, and merge the per-point summaries into one table.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from sapsim.busch import g_from_eg
from sapsim.grid import Grid1D, TwoBodyWavefunction, mirror, save_wavefunction
from sapsim.hamiltonian import TrapConfiguration, prepare_ground_state, total_energy
from sapsim.observables import (
    noon_superposition,
    reduced_density,
    state_fidelity,
    trap_populations,
    vn_entropy,
)
from sapsim.propagate import PropagationSettings, evolve
from sapsim.schedules import (
    ProtocolSchedule,
    noon_schedule,
    schedule_to_csv,
    separation_schedule,
    transport_schedule,
)

PROTOCOLS = ("transport", "noon", "separation")
FIDELITY_FLAG_THRESHOLD = 0.98


class ConfigError(ValueError):
    """Invalid run configuration."""


class StageError(RuntimeError):
    """A named pipeline stage failed; the stage tag travels with it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    """One protocol run (or one sweep) fully specified.

    All module preconditions are validated up front by validate(); the
    seed field is reserved for future stochastic extensions and unused
    by the deterministic runs.
    """

    protocol: str = "transport"
    e_g: float | None = None
    e_g_values: tuple[float, ...] = ()
    n_points: int = 256
    box: tuple[float, float] = (-14.0, 14.0)
    duration: float = 800.0
    d_far: float = 9.0
    d_near: float = 3.0
    dt: float = 5e-3
    snapshot_stride: int = 400
    out_dir: str = "runs"
    workers: int = 1
    seed: int | None = None
    save_snapshots: bool = False
    figures: bool = True

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; "
                              f"choose from {PROTOCOLS}")
        energies = list(self.e_g_values) or ([self.e_g] if self.e_g is not None else [])
        if not energies:
            raise ConfigError("need e_g (single run) or e_g_values (sweep)")
        for e in energies:
            if not 1.0 <= e < 2.0:
                raise ConfigError(f"e_g must lie in [1, 2), got {e}")
        if self.n_points <= 0 or self.n_points & (self.n_points - 1):
            raise ConfigError(f"n_points must be a power of two, got {self.n_points}")
        if not self.box[0] < self.box[1]:
            raise ConfigError(f"box must be (x_min, x_max) with x_min < x_max")
        if not 0.0 < self.d_near < self.d_far:
            raise ConfigError(f"need 0 < d_near < d_far, got "
                              f"({self.d_near}, {self.d_far})")
        if self.d_far >= self.box[1] or -self.d_far <= self.box[0] + 1.0:
            pass  # traps must fit with margin; checked loosely below
        if self.box[1] - self.d_far < 3.0:
            raise ConfigError("box must extend at least 3 oscillator lengths "
                              "beyond the resting traps")
        if self.duration < 0:
            raise ConfigError("duration must be non-negative")
        grid = self.grid()
        try:
            self.settings().validate_for(grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def grid(self) -> Grid1D:
        return Grid1D(n_points=self.n_points, x_min=self.box[0], x_max=self.box[1])

    def settings(self) -> PropagationSettings:
        return PropagationSettings(dt=self.dt, t_total=self.duration,
                                   snapshot_stride=self.snapshot_stride)

    def schedule(self, e_g: float) -> ProtocolSchedule:
        if self.protocol == "transport":
            return transport_schedule(self.duration, self.d_far, self.d_near)
        if self.protocol == "noon":
            return noon_schedule(self.duration, self.d_far, self.d_near)
        return separation_schedule(self.duration, self.d_far, self.d_near, e_g)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["e_g_values"] = list(self.e_g_values)
        d["box"] = list(self.box)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "box" in data:
            data["box"] = tuple(data["box"])
        if "e_g_values" in data:
            data["e_g_values"] = tuple(data["e_g_values"])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class RunReport:
    """Summary and time series of one protocol run."""

    protocol: str
    e_g: float
    g: float
    fidelity_final: float
    s_initial: float
    s_final: float
    s_max: float
    populations_final: dict
    flagged: bool
    wall_time_s: float
    out_dir: str | None
    times: np.ndarray = field(repr=False)
    entropy: np.ndarray = field(repr=False)
    fidelity: np.ndarray = field(repr=False)
    populations: dict = field(repr=False)
    norm: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)

    def summary_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "e_g": self.e_g,
            "g": self.g,
            "fidelity_final": self.fidelity_final,
            "s_initial": self.s_initial,
            "s_final": self.s_final,
            "s_max": self.s_max,
            "populations_final": self.populations_final,
            "flagged_below_098": self.flagged,
            "wall_time_s": round(self.wall_time_s, 3),
        }


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def reference_state(config: RunConfig, e_g: float, grid: Grid1D,
                    schedule: ProtocolSchedule, g: float,
                    initial: TwoBodyWavefunction) -> TwoBodyWavefunction:
    """Target state of the protocol, built in the final trap configuration.

    transport:  pair in the right trap, the mirror image of the prepared
                initial state (the rest geometry is symmetric).
    noon:       (|2 0 0> - |0 0 2>)/sqrt(2) with the dark-state sign.
    separation: one atom in each outer trap, prepared by relaxation in
                the final (offset) configuration.
    """
    if config.protocol == "transport":
        return mirror(initial)
    if config.protocol == "noon":
        return noon_superposition(initial, mirror(initial))
    final_cfg = schedule.at(schedule.duration)
    return prepare_ground_state(final_cfg, g, grid, "LR")


def run_protocol(config: RunConfig, e_g: float | None = None,
                 out_dir: str | Path | None = "") -> RunReport:
    """Execute one protocol run; write outputs unless out_dir is None.

    out_dir="" (default) uses config.out_dir. Any stage failure is
    re-raised as StageError carrying the failing stage's name; outputs
    produced so far stay on disk.
    """
    t_start = time.perf_counter()
    try:
        config.validate()
        if e_g is None:
            e_g = config.e_g if config.e_g is not None else config.e_g_values[0]
    except ConfigError as exc:
        raise StageError("config", exc) from exc

    if out_dir == "":
        out_dir = config.out_dir
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    try:
        grid = config.grid()
        g = g_from_eg(e_g)
        schedule = config.schedule(e_g)
        settings = config.settings()
    except (ValueError, ConfigError) as exc:
        raise StageError("setup", exc) from exc

    try:
        initial = prepare_ground_state(schedule.at(0.0), g, grid, "LL")
        ref = reference_state(config, e_g, grid, schedule, g, initial)
    except Exception as exc:
        raise StageError("prepare", exc) from exc

    times, entropies, fidelities, norms, energies = [], [], [], [], []
    pops = {k: [] for k in ("p_LL", "p_MM", "p_RR", "p_LM", "p_LR", "p_MR")}
    snap_dir = None
    if out is not None and config.save_snapshots:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)

    try:
        for t, snap in evolve(initial, schedule, g, settings):
            cfg_t = schedule.at(t)
            times.append(t)
            entropies.append(vn_entropy(reduced_density(snap)))
            fidelities.append(state_fidelity(snap, ref))
            p = trap_populations(snap, cfg_t)
            for key, val in p.as_dict().items():
                pops[key].append(val)
            norms.append(snap.norm())
            energies.append(total_energy(snap, cfg_t, g))
            if snap_dir is not None:
                save_wavefunction(snap_dir / f"t{t:012.4f}.wf", snap)
    except Exception as exc:
        _flush_timeseries(out, times, entropies, pops, fidelities, norms, energies)
        raise StageError("propagate", exc) from exc

    times = np.asarray(times)
    entropies = np.asarray(entropies)
    fidelities = np.asarray(fidelities)
    pop_arrays = {k: np.asarray(v) for k, v in pops.items()}

    report = RunReport(
        protocol=config.protocol,
        e_g=e_g,
        g=g,
        fidelity_final=float(fidelities[-1]),
        s_initial=float(entropies[0]),
        s_final=float(entropies[-1]),
        s_max=float(np.max(entropies)),
        populations_final={k: float(v[-1]) for k, v in pop_arrays.items()},
        flagged=bool(fidelities[-1] < FIDELITY_FLAG_THRESHOLD),
        wall_time_s=time.perf_counter() - t_start,
        out_dir=str(out) if out is not None else None,
        times=times,
        entropy=entropies,
        fidelity=fidelities,
        populations=pop_arrays,
        norm=np.asarray(norms),
        energy=np.asarray(energies),
    )

    if out is not None:
        try:
            _write_run_outputs(out, config, report, schedule)
        except Exception as exc:
            raise StageError("write", exc) from exc
    return report


def _flush_timeseries(out, times, entropies, pops, fidelities, norms, energies):
    """Best-effort partial dump when propagation aborts."""
    if out is None or not times:
        return
    rows = zip(times, entropies, *pops.values(), fidelities)
    try:
        with open(out / "timeseries_partial.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "S", *pops.keys(), "fidelity"])
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError:
        pass


def _write_run_outputs(out: Path, config: RunConfig, report: RunReport,
                       schedule: ProtocolSchedule) -> None:
    with open(out / "timeseries.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "S", "p_LL", "p_MM", "p_RR", "p_LM", "p_LR",
                         "p_MR", "fidelity"])
        for i, t in enumerate(report.times):
            writer.writerow([_fmt(t), _fmt(report.entropy[i])]
                            + [_fmt(report.populations[k][i])
                               for k in ("p_LL", "p_MM", "p_RR",
                                         "p_LM", "p_LR", "p_MR")]
                            + [_fmt(report.fidelity[i])])
    with open(out / "scalars.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "norm", "energy"])
        for i, t in enumerate(report.times):
            writer.writerow([_fmt(t), _fmt(report.norm[i]), _fmt(report.energy[i])])
    schedule_to_csv(schedule, out / "schedule.csv")
    summary = {"config": config.to_dict(), **report.summary_dict()}
    summary["config"]["e_g"] = report.e_g
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if config.figures:
        from sapsim import report as report_mod
        report_mod.run_figures(out, report)


def _sweep_point(config_dict: dict, e_g: float) -> dict:
    """Worker entry: run one sweep point, return a summary row."""
    config = RunConfig.from_dict(config_dict)
    point_dir = Path(config.out_dir) / f"eg_{e_g:.3f}"
    try:
        report = run_protocol(config, e_g=e_g, out_dir=point_dir)
        row = {"e_g": e_g, "status": "ok", "error": "",
               **{k: v for k, v in report.summary_dict().items()
                  if k in ("fidelity_final", "s_initial", "s_final", "s_max")},
               "flagged_below_098": report.flagged}
    except Exception as exc:  # per-point failures must not kill the sweep
        row = {"e_g": e_g, "status": "error", "error": str(exc),
               "fidelity_final": float("nan"), "s_initial": float("nan"),
               "s_final": float("nan"), "s_max": float("nan"),
               "flagged_below_098": True}
    return row


SWEEP_COLUMNS = ["e_g", "status", "fidelity_final", "s_initial", "s_final",
                 "s_max", "flagged_below_098", "error"]


def sweep_eg(config: RunConfig) -> list[dict]:
    """Run the protocol at every e_g in config.e_g_values.

    Points run concurrently up to config.workers; per-point failures are
    recorded in the table and the sweep continues. Writes sweep.csv (rows
    ordered by e_g) and a two-panel figure next to the per-point output
    directories.
    """
    try:
        config.validate()
        if not config.e_g_values:
            raise ConfigError("sweep needs a non-empty e_g_values list")
    except ConfigError as exc:
        raise StageError("config", exc) from exc

    energies = sorted(config.e_g_values)
    config_dict = config.to_dict()
    if config.workers > 1 and len(energies) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_sweep_point, [config_dict] * len(energies),
                                 energies))
    else:
        rows = [_sweep_point(config_dict, e) for e in energies]
    rows.sort(key=lambda r: r["e_g"])

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            formatted = dict(row)
            for key in ("e_g", "fidelity_final", "s_initial", "s_final", "s_max"):
                formatted[key] = _fmt(row[key]) if np.isfinite(row[key]) else "nan"
            writer.writerow(formatted)
    if config.figures:
        from sapsim import report as report_mod
        report_mod.sweep_figure(out / "sweep.png", rows,
                                title=f"{config.protocol} sweep")
    return rows


@dataclass(frozen=True)
class DecompositionResult:
    """Entropy split of the canonical states at one interaction energy."""

    e_g: float
    g: float
    s_int: float    # pair ground state in one trap
    s_dist: float   # one atom in each outer trap (ln 2)
    s_noon: float   # balanced pair superposition over the outer traps
    residual: float  # s_noon - s_int - s_dist


def entropy_decomposition(e_g: float, n_points: int = 512,
                          box: tuple[float, float] = (-12.0, 12.0),
                          trap_distance: float = 9.0) -> DecompositionResult:
    """Interaction vs distribution contributions to the entropy.

    The localized pair state is relaxed once in a central trap and
    translated onto the outer trap positions by exact grid shifts, so
    the trap distance must be an integer number of grid cells.
    """
    if not 1.0 <= e_g < 2.0:
        raise ConfigError(f"e_g must lie in [1, 2), got {e_g}")
    grid = Grid1D(n_points=n_points, x_min=box[0], x_max=box[1])
    shift = trap_distance / grid.dx
    if abs(shift - round(shift)) > 1e-9:
        raise ConfigError(
            f"trap distance {trap_distance} is not an integer number of grid "
            f"cells (dx={grid.dx:g}); pick a commensurate box"
        )
    shift = int(round(shift))
    g = g_from_eg(e_g)

    central = TrapConfiguration((0.0, 0.0, 0.0))
    pair = prepare_ground_state(central, g, grid, "MM")
    s_int = vn_entropy(reduced_density(pair))

    from sapsim.hamiltonian import gaussian_orbital, symmetrized_product

    phi_l = gaussian_orbital(grid, -trap_distance)
    phi_r = gaussian_orbital(grid, trap_distance)
    split = symmetrized_product(phi_l, phi_r, grid)
    s_dist = vn_entropy(reduced_density(split))

    pair_left = TwoBodyWavefunction(
        np.roll(pair.psi, (-shift, -shift), axis=(0, 1)), grid)
    pair_right = TwoBodyWavefunction(
        np.roll(pair.psi, (shift, shift), axis=(0, 1)), grid)
    noon = noon_superposition(pair_left, pair_right)
    s_noon = vn_entropy(reduced_density(noon))

    return DecompositionResult(e_g=e_g, g=g, s_int=s_int, s_dist=s_dist,
                               s_noon=s_noon,
                               residual=s_noon - s_int - s_dist)


def write_decomposition_csv(path, results: list[DecompositionResult]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["e_g", "g", "S_int", "S_dist", "S_noon", "residual"])
        for r in results:
            writer.writerow([_fmt(v) for v in
                             (r.e_g, r.g, r.s_int, r.s_dist, r.s_noon, r.residual)])
