"""Run orchestration and on-disk artifacts.

A run steps the solver to the final time, collecting an energy/metric row
and a full snapshot at the configured cadence, and leaves behind a
deterministic artifact tree:

    out/
      run_manifest.json      resolved config, classification, file checksums
      timeseries.csv         one diagnostics row per snapshot time
      snapshots/snapshot_NNNN.csv
      profiles/boundary_layer.csv, rarefaction.csv, phase_curves.csv,
               phase_markers.csv

Identical configs produce byte-identical CSVs; the manifest additionally
records wall-clock and completion status.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import EnergyReport, energy_report
from .errors import PositivityError
from .gas import GasParameters, pressure, sound_speed
from .phase_plane import Classification
from .profiles import CompositeWave
from .solver import FieldState, FluidState, Grid, SimConfig, cfl_dt, initial_data, poisson_field, step

TIMESERIES_COLUMNS = (
    "t",
    "sup_dist_rho_i", "sup_dist_u_i", "sup_dist_rho_e", "sup_dist_u_e", "sup_E",
    "h1_phi_i", "h1_psi_i", "h1_phi_e", "h1_psi_e",
    "energy_total", "diss_psi", "diss_weighted",
    "trace_phi_i0", "trace_phi_e0", "trace_E0",
)

SNAPSHOT_COLUMNS = ("x", "rho_i", "u_i", "rho_e", "u_e", "E", "rho_hat", "u_hat")


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return repr(float(value))


def write_csv(path: Path, columns, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_snapshot(path: Path, state: FluidState, field: FieldState, background, grid: Grid) -> None:
    base = background.evaluate(grid.x, state.t)
    rows = zip(grid.x, state.rho_i, state.u_i, state.rho_e, state.u_e,
               field.E, base.rho, base.u)
    write_csv(path, SNAPSHOT_COLUMNS, rows)


def write_timeseries(path: Path, reports: list[EnergyReport]) -> None:
    rows = [[getattr(r, c) for c in TIMESERIES_COLUMNS] for r in reports]
    write_csv(path, TIMESERIES_COLUMNS, rows)


def write_profile_tables(out_dir: Path, cw: CompositeWave, grid: Grid,
                         times=(0.0, 10.0, 50.0, 200.0)) -> list[Path]:
    """Boundary-layer and rarefaction tables plus phase-plane curve data."""
    prof = out_dir / "profiles"
    written = []

    delta = max(cw.bl.delta_tilde, 1e-3)
    x_bl = np.unique(np.concatenate([
        np.linspace(0.0, 20.0 / delta, 800),
        np.geomspace(20.0 / delta, 1e4 / delta, 400),
    ]))
    b = cw.bl.evaluate(x_bl)
    path = prof / "boundary_layer.csv"
    write_csv(path, ("x", "u", "rho", "du_dx", "d2u_dx2"),
              zip(x_bl, b.u, b.rho, b.u_x, b.u_xx))
    written.append(path)

    rows = []
    for t in times:
        f = cw.fan.evaluate(grid.x, float(t))
        rows.extend(zip(grid.x, [float(t)] * grid.x.size, f.w, f.rho, f.u))
    path = prof / "rarefaction.csv"
    write_csv(path, ("x", "t", "w", "rho", "u"), rows)
    written.append(path)

    written.extend(write_phase_plane_tables(prof, cw))
    return written


def write_phase_plane_tables(prof: Path, cw: CompositeWave) -> list[Path]:
    """Curve samples and markers for the phase-plane figure.

    The plotting component consumes these CSVs verbatim so all the physics
    stays on this side of the artifact boundary.
    """
    p, tp, ff, bd = cw.gas, cw.tp, cw.ff, cw.bd
    rows = []

    # wall line through the origin and the corner state: u/v = u*/v*
    v = np.linspace(tp.v_star * 0.05, tp.v_star * 3.0, 120)
    for vv, uu in zip(v, tp.u_star / tp.v_star * v):
        rows.append(("BL", vv, uu))

    # 2-rarefaction curve through the far field (v >= v+)
    v = np.geomspace(ff.v_plus, max(3.0 * tp.v_star, 2.0 * ff.v_plus), 200)
    root_ga = np.sqrt(p.gamma * p.A)
    u = ff.u_plus - 2.0 * root_ga / (p.gamma - 1.0) * (
        ff.v_plus ** (-(p.gamma - 1.0) / 2.0) - v ** (-(p.gamma - 1.0) / 2.0)
    )
    for vv, uu in zip(v, u):
        rows.append(("R2", vv, uu))

    # 2-shock curve through the far field (v < v+), drawn for orientation only
    v = np.linspace(0.3 * ff.v_plus, ff.v_plus, 120)
    u = ff.u_plus + np.sqrt(
        np.maximum((pressure(p, 1.0 / v) - pressure(p, ff.rho_plus)) * (ff.v_plus - v), 0.0)
    )
    for vv, uu in zip(v, u):
        rows.append(("S2", vv, uu))

    # sonic boundary u = -C(1/v)
    v = np.geomspace(0.2 * min(ff.v_plus, tp.v_star), 4.0 * tp.v_star, 160)
    for vv, uu in zip(v, -sound_speed(p, 1.0 / v)):
        rows.append(("sonic", vv, uu))

    curves = prof / "phase_curves.csv"
    write_csv(curves, ("curve", "v", "u"),
              [(name, _fmt(vv), _fmt(uu)) for name, vv, uu in rows])

    rho_b = cw.bl.rho_b
    markers = prof / "phase_markers.csv"
    write_csv(markers, ("name", "v", "u"), [
        ("far_field", _fmt(ff.v_plus), _fmt(ff.u_plus)),
        ("transonic", _fmt(tp.v_star), _fmt(tp.u_star)),
        ("boundary", _fmt(1.0 / rho_b), _fmt(bd.u_b)),
    ])
    return [curves, markers]


def _checksum(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunResult:
    state: FluidState
    field: FieldState
    reports: list
    n_steps: int
    out_dir: Path | None
    status: str


class RunWriter:
    """Accumulates artifacts and finalizes the manifest."""

    def __init__(self, out_dir: Path | None, config_echo: dict,
                 classification: Classification | None):
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.config_echo = config_echo
        self.classification = classification
        self.files: list[Path] = []
        self.snapshot_times: list[float] = []
        self.t_start = time.time()
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            self._write_manifest("running")

    def manifest_path(self) -> Path:
        return self.out_dir / "run_manifest.json"

    def _write_manifest(self, status: str, extra: dict | None = None) -> None:
        if self.out_dir is None:
            return
        body = {
            "version": __version__,
            "status": status,
            "config": self.config_echo,
            "classification": None,
            "wall_clock_s": time.time() - self.t_start,
            "snapshot_times": self.snapshot_times,
            "files": {
                str(f.relative_to(self.out_dir)): _checksum(f) for f in self.files
            },
        }
        if self.classification is not None:
            cls = self.classification
            body["classification"] = {
                "case": cls.case.value,
                "rho_b": cls.rho_b,
                "transonic": None if cls.transonic is None else {
                    "v_star": cls.transonic.v_star,
                    "rho_star": cls.transonic.rho_star,
                    "u_star": cls.transonic.u_star,
                },
                "reason": cls.reason,
            }
        if extra:
            body.update(extra)
        self.manifest_path().write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")

    def add(self, path: Path) -> None:
        self.files.append(path)

    def snapshot(self, index: int, state, field, background, grid) -> None:
        if self.out_dir is None:
            return
        path = self.out_dir / "snapshots" / f"snapshot_{index:04d}.csv"
        write_snapshot(path, state, field, background, grid)
        self.files.append(path)
        self.snapshot_times.append(state.t)

    def finalize(self, status: str, extra: dict | None = None) -> None:
        self._write_manifest(status, extra)


def run_simulation(
    gas: GasParameters,
    grid: Grid,
    sim: SimConfig,
    background,
    classification: Classification | None = None,
    out_dir=None,
    config_echo: dict | None = None,
) -> RunResult:
    """Step the solver to t_final, collecting diagnostics at the snapshot
    cadence and writing the artifact tree when an output directory is given.

    Deterministic: the step sizes depend only on the config and the state,
    and all randomness is seeded through the perturbation spec.
    """
    writer = RunWriter(out_dir, config_echo or {}, classification)
    state, h1 = initial_data(background, sim.perturbation, grid, gas)
    reports: list[EnergyReport] = []
    n_steps = 0
    snap_index = 0
    field = poisson_field(state.rho_i, state.rho_e, grid)

    def record(st, fld):
        nonlocal snap_index
        reports.append(energy_report(st, background, fld, grid, gas))
        writer.snapshot(snap_index, st, fld, background, grid)
        snap_index += 1

    try:
        record(state, field)
        next_snap = sim.snapshot_dt
        while state.t < sim.t_final and (sim.max_steps is None or n_steps < sim.max_steps):
            dt = cfl_dt(state, grid, sim, gas)
            dt = min(dt, sim.t_final - state.t, next_snap - state.t)
            if n_steps % sim.field_refresh == 0:
                field = poisson_field(state.rho_i, state.rho_e, grid)
            state, field = step(state, grid, gas, sim, background, dt=dt, field=field)
            n_steps += 1
            if state.t >= next_snap - 1e-12 or state.t >= sim.t_final:
                record(state, field)
                next_snap = round(state.t / sim.snapshot_dt + 1.0) * sim.snapshot_dt
    except PositivityError as exc:
        if writer.out_dir is not None:
            path = writer.out_dir / "snapshots" / "failure_snapshot.csv"
            write_snapshot(path, state, field, background, grid)
            writer.add(path)
            write_timeseries(writer.out_dir / "timeseries.csv", reports)
            writer.add(writer.out_dir / "timeseries.csv")
            writer.finalize("failed", {"failure": str(exc), "perturbation_h1": h1})
        raise

    if writer.out_dir is not None:
        write_timeseries(writer.out_dir / "timeseries.csv", reports)
        writer.add(writer.out_dir / "timeseries.csv")
        if isinstance(background, CompositeWave):
            for path in write_profile_tables(writer.out_dir, background, grid):
                writer.add(path)
        writer.finalize("completed", {
            "n_steps": n_steps,
            "perturbation_h1": h1,
            "t_final_reached": state.t,
        })

    return RunResult(state=state, field=field, reports=reports, n_steps=n_steps,
                     out_dir=writer.out_dir, status="completed")


def verify_manifest(out_dir) -> bool:
    """Re-hash every file listed in a run manifest."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "run_manifest.json").read_text())
    return all(
        _checksum(out_dir / rel) == digest
        for rel, digest in manifest["files"].items()
    )
