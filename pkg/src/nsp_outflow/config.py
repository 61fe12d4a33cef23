"""Run configuration: JSON files with strict key checking, named presets,
and assembly of the objects a run needs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ClassificationError, ConfigError
from .gas import GasParameters
from .phase_plane import (
    BoundaryData,
    Case,
    Classification,
    FarField,
    classify,
    transonic_point,
)
from .profiles import ConstantBackground, RarefactionParams, build_composite
from .solver import Grid, PerturbationSpec, SimConfig

PRESET_NAMES = (
    "caseIII-2",
    "caseIV-2",
    "pure-rarefaction",
    "pure-boundary-layer",
    "quasineutral-sanity",
)

_DEFAULTS = {
    "gas": {"A": 1.0 / 3.0, "gamma": 3.0, "mu": 1.0},
    "far_field": {"rho_plus": 1.0, "u_plus": 0.2},
    "boundary": {"u_b": -0.8},
    "rarefaction": {"q": 10, "eps": 0.1},
    "grid": {"L": 400.0, "N": 4000},
    "solver": {
        "cfl": 0.5,
        "t_final": 200.0,
        "snapshot_dt": 1.0,
        "scheme": "upwind1",
        "terms": "full",
        "field_refresh": 1,
        "max_steps": None,
    },
    "perturbation": {
        "amplitude": 1.0,
        "center": 5.0,
        "width": 10.0,
        "shape": "sin2",
        "fields": ["rho_i", "u_i"],
        "seed": 0,
        "h1_target": 0.01,
    },
    "background": "composite",
    "constant_state": {"rho": 1.0, "u": -0.8},
    "output_dir": None,
    "label": "caseIV-2",
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for one run."""

    gas: GasParameters
    far_field: FarField
    boundary: BoundaryData
    rarefaction: RarefactionParams
    grid: Grid
    sim: SimConfig
    background: str = "composite"
    constant_state: tuple[float, float] = (1.0, -0.8)
    output_dir: str | None = None
    label: str = "custom"

    def __post_init__(self) -> None:
        if self.background not in ("composite", "constant"):
            raise ConfigError(f"unknown background kind {self.background!r}")

    def classification(self, strict: bool = False) -> Classification | None:
        if self.background != "composite":
            return None
        try:
            cls = classify(self.gas, self.far_field, self.boundary)
        except ClassificationError as exc:
            if strict:
                raise ConfigError(f"configuration is not simulable: {exc}") from exc
            raise
        if strict:
            if cls.transonic is None:
                raise ConfigError(
                    f"configuration is not simulable ({cls.case.value}): {cls.reason}"
                )
            degenerate_fan_ok = abs(self.boundary.u_b - cls.transonic.u_star) <= 1e-13
            if cls.case not in (Case.III_2, Case.IV_2, Case.II) and not degenerate_fan_ok:
                raise ConfigError(
                    "simulation needs a layer+fan pattern (III-2/IV-2) or a "
                    f"degenerate limit of one; data classify as {cls.case.value}"
                )
        return cls

    def make_background(self):
        """Object the solver runs against; composite data must classify as a
        layer+fan pattern (or a degenerate limit) to be simulable."""
        if self.background == "constant":
            rho0, u0 = self.constant_state
            return ConstantBackground(rho0=rho0, u0=u0)
        self.classification(strict=True)
        return build_composite(self.gas, self.far_field, self.boundary, self.rarefaction)

    def to_dict(self) -> dict:
        sim = self.sim
        pert = sim.perturbation
        return {
            "gas": {"A": self.gas.A, "gamma": self.gas.gamma, "mu": self.gas.mu},
            "far_field": {
                "rho_plus": self.far_field.rho_plus,
                "u_plus": self.far_field.u_plus,
            },
            "boundary": {"u_b": self.boundary.u_b},
            "rarefaction": {"q": self.rarefaction.q, "eps": self.rarefaction.eps},
            "grid": {"L": self.grid.L, "N": self.grid.N},
            "solver": {
                "cfl": sim.cfl,
                "t_final": sim.t_final,
                "snapshot_dt": sim.snapshot_dt,
                "scheme": sim.scheme,
                "terms": sim.terms,
                "field_refresh": sim.field_refresh,
                "max_steps": sim.max_steps,
            },
            "perturbation": None if pert is None else {
                "amplitude": pert.amplitude,
                "center": pert.center,
                "width": pert.width,
                "shape": pert.shape,
                "fields": list(pert.fields),
                "seed": pert.seed,
                "h1_target": pert.h1_target,
            },
            "background": self.background,
            "constant_state": {
                "rho": self.constant_state[0],
                "u": self.constant_state[1],
            },
            "output_dir": self.output_dir,
            "label": self.label,
        }


def _merge_section(name: str, defaults: dict, given) -> dict:
    if given is None:
        return dict(defaults)
    if not isinstance(given, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown keys in section {name!r}: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(given)
    return merged


def from_dict(data: dict) -> RunConfig:
    """Build a validated RunConfig from nested key/value data.

    Unknown keys are hard errors so typos cannot silently fall back to
    defaults.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(data) - set(_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    gas_d = _merge_section("gas", _DEFAULTS["gas"], data.get("gas"))
    ff_d = _merge_section("far_field", _DEFAULTS["far_field"], data.get("far_field"))
    bd_d = _merge_section("boundary", _DEFAULTS["boundary"], data.get("boundary"))
    rp_d = _merge_section("rarefaction", _DEFAULTS["rarefaction"], data.get("rarefaction"))
    grid_d = _merge_section("grid", _DEFAULTS["grid"], data.get("grid"))
    sim_d = _merge_section("solver", _DEFAULTS["solver"], data.get("solver"))
    cs_d = _merge_section("constant_state", _DEFAULTS["constant_state"],
                          data.get("constant_state"))

    if "perturbation" in data and data["perturbation"] is None:
        pert = None
    else:
        pert_d = _merge_section("perturbation", _DEFAULTS["perturbation"],
                                data.get("perturbation"))
        pert = PerturbationSpec(
            amplitude=float(pert_d["amplitude"]),
            center=float(pert_d["center"]),
            width=float(pert_d["width"]),
            shape=str(pert_d["shape"]),
            fields=tuple(pert_d["fields"]),
            seed=int(pert_d["seed"]),
            h1_target=None if pert_d["h1_target"] is None else float(pert_d["h1_target"]),
        )

    return RunConfig(
        gas=GasParameters(A=float(gas_d["A"]), gamma=float(gas_d["gamma"]),
                          mu=float(gas_d["mu"])),
        far_field=FarField(rho_plus=float(ff_d["rho_plus"]), u_plus=float(ff_d["u_plus"])),
        boundary=BoundaryData(u_b=float(bd_d["u_b"])),
        rarefaction=RarefactionParams(q=int(rp_d["q"]), eps=float(rp_d["eps"])),
        grid=Grid(L=float(grid_d["L"]), N=int(grid_d["N"])),
        sim=SimConfig(
            cfl=float(sim_d["cfl"]),
            t_final=float(sim_d["t_final"]),
            snapshot_dt=float(sim_d["snapshot_dt"]),
            scheme=str(sim_d["scheme"]),
            terms=str(sim_d["terms"]),
            field_refresh=int(sim_d["field_refresh"]),
            max_steps=None if sim_d["max_steps"] is None else int(sim_d["max_steps"]),
            perturbation=pert,
        ),
        background=str(data.get("background", _DEFAULTS["background"])),
        constant_state=(float(cs_d["rho"]), float(cs_d["u"])),
        output_dir=data.get("output_dir"),
        label=str(data.get("label", "custom")),
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file; empty files mean all defaults."""
    text = Path(path).read_text().strip()
    if not text:
        return preset("caseIV-2")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return from_dict(data)


def save_config(config: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")


def preset(name: str) -> RunConfig:
    """Named configurations for the supported wave patterns and sanity runs."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; options: {', '.join(PRESET_NAMES)}")
    gas = GasParameters()

    if name == "caseIV-2":
        return from_dict({"label": name})

    if name == "caseIII-2":
        return from_dict({
            "far_field": {"rho_plus": 1.0, "u_plus": -0.1},
            "boundary": {"u_b": -0.8},
            "label": name,
        })

    if name == "pure-rarefaction":
        ff = FarField(1.0, 0.2)
        u_star = transonic_point(gas, ff).u_star
        return from_dict({
            "boundary": {"u_b": u_star},
            "grid": {"L": 200.0, "N": 2000},
            "solver": {"t_final": 50.0},
            "perturbation": None,
            "label": name,
        })

    if name == "pure-boundary-layer":
        tp = transonic_point(gas, FarField(1.0, 0.2))
        return from_dict({
            "far_field": {"rho_plus": tp.rho_star, "u_plus": tp.u_star},
            "boundary": {"u_b": -0.8},
            "grid": {"L": 100.0, "N": 1000},
            "solver": {"t_final": 50.0},
            "perturbation": None,
            "label": name,
        })

    # quasineutral-sanity: constant background, no perturbation; the run
    # must preserve the state to rounding.
    return from_dict({
        "background": "constant",
        "constant_state": {"rho": 1.0, "u": -0.8},
        "boundary": {"u_b": -0.8},
        "grid": {"L": 40.0, "N": 400},
        "solver": {"t_final": 1e9, "max_steps": 10000, "snapshot_dt": 25.0},
        "perturbation": None,
        "label": name,
    })
