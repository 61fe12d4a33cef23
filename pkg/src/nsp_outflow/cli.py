"""Command-line interface.

Subcommands: classify, build-profiles, simulate, verify-lemmas,
verify-theorem.  Exit codes: 0 success, 1 physics/assertion failure,
2 usage error.  Failures print a JSON report so scripts can consume them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import PRESET_NAMES, RunConfig, from_dict, load_config, preset
from .diagnostics import (
    appendix_scaling_check,
    decay_fit,
    envelope_fit,
    source_envelope,
    source_integrals,
)
from .errors import ConfigError, PositivityError
from .phase_plane import wave_strengths
from .runner import run_simulation, write_profile_tables

#: verify-lemmas check names; numeric aliases select the same suites.
LEMMA_CHECKS = {
    "bl-decay": "2.1",
    "fan-decay": "2.2",
    "source-envelopes": "2.14",
    "bl-integrals": "4.1",
}
_LEMMA_ALIASES = {"2.1": "bl-decay", "2.2": "fan-decay", "2.3": "fan-decay",
                  "2.14": "source-envelopes", "4.1": "bl-integrals"}


def _fail(report: dict) -> int:
    print(json.dumps({"status": "failed", **report}, sort_keys=True))
    return 1


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="JSON config file")
    sub.add_argument("--preset", choices=PRESET_NAMES, help="named configuration")
    sub.add_argument("--out", type=Path, help="output directory")
    sub.add_argument("--gamma", type=float, help="adiabatic exponent")
    sub.add_argument("--A", type=float, help="pressure coefficient")
    sub.add_argument("--rho-plus", type=float, help="far-field density")
    sub.add_argument("--u-plus", type=float, help="far-field velocity")
    sub.add_argument("--u-b", type=float, help="wall velocity (outflow: < 0)")
    sub.add_argument("--eps", type=float, help="mollifier steepness")
    sub.add_argument("--q", type=int, help="mollifier exponent")
    sub.add_argument("--L", type=float, help="domain length")
    sub.add_argument("--N", type=int, help="cell count")
    sub.add_argument("--cfl", type=float, help="Courant number")
    sub.add_argument("--t-final", type=float, help="final time")
    sub.add_argument("--amplitude", type=float, help="perturbation bump height")
    sub.add_argument("--seed", type=int, help="perturbation seed")


def _resolve_config(args) -> RunConfig:
    """File/preset values first, then flag overrides."""
    if args.config is not None:
        cfg = load_config(args.config)
    elif args.preset is not None:
        cfg = preset(args.preset)
    else:
        cfg = preset("caseIV-2")
    data = cfg.to_dict()

    overrides = {
        ("gas", "gamma"): args.gamma,
        ("gas", "A"): args.A,
        ("far_field", "rho_plus"): args.rho_plus,
        ("far_field", "u_plus"): args.u_plus,
        ("boundary", "u_b"): args.u_b,
        ("rarefaction", "eps"): args.eps,
        ("rarefaction", "q"): args.q,
        ("grid", "L"): args.L,
        ("grid", "N"): args.N,
        ("solver", "cfl"): args.cfl,
        ("solver", "t_final"): args.t_final,
    }
    for (section, key), value in overrides.items():
        if value is not None:
            data[section][key] = value
    if args.amplitude is not None:
        if data["perturbation"] is None:
            data["perturbation"] = {}
        data["perturbation"]["amplitude"] = args.amplitude
        data["perturbation"]["h1_target"] = None
    if args.seed is not None:
        if data["perturbation"] is None:
            data["perturbation"] = {}
        data["perturbation"]["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = str(args.out)
    return from_dict(data)


def cmd_classify(args) -> int:
    cfg = _resolve_config(args)
    cls = cfg.classification()
    if cls is None:
        print("background: constant (no classification)")
        return 0
    print(f"case: {cls.case.value}")
    if cls.reason:
        print(f"note: {cls.reason}")
    if cls.transonic is not None:
        tp = cls.transonic
        print(f"transonic point: rho*={tp.rho_star!r} u*={tp.u_star!r} v*={tp.v_star!r}")
    if cls.rho_b is not None:
        print(f"rho_b: {cls.rho_b!r}")
    if cls.transonic is not None and cfg.boundary.u_b <= cls.transonic.u_star + 1e-14:
        ws = wave_strengths(cls.transonic, cfg.far_field, cfg.boundary, cfg.gas)
        print(f"strengths: delta_tilde={ws.delta_tilde!r} delta_r={ws.delta_r!r} "
              f"delta_bar={ws.delta_bar!r}")
    return 0


def cmd_build_profiles(args) -> int:
    cfg = _resolve_config(args)
    out = Path(cfg.output_dir or "out")
    background = cfg.make_background()
    written = write_profile_tables(out, background, cfg.grid)
    for path in written:
        print(path)
    return 0


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    out = cfg.output_dir or "out"
    background = cfg.make_background()
    try:
        result = run_simulation(
            cfg.gas, cfg.grid, cfg.sim, background,
            classification=cfg.classification(),
            out_dir=out, config_echo=cfg.to_dict(),
        )
    except PositivityError as exc:
        return _fail({"reason": str(exc), "out_dir": str(out)})
    first, last = result.reports[0], result.reports[-1]
    print(f"completed {result.n_steps} steps to t={result.state.t:g}")
    print(f"artifacts: {result.out_dir}")
    if cfg.background == "constant":
        drift = max(
            abs(last.h1_phi_i), abs(last.h1_psi_i), abs(last.h1_phi_e), abs(last.h1_psi_e)
        )
        print(f"max perturbation H1 drift: {drift:.3e}")
    else:
        print(f"sup|E|: start {first.sup_E:.6g} end {last.sup_E:.6g}")
    return 0


def _check_bl_decay(cfg: RunConfig, report: dict) -> bool:
    from .profiles import solve_boundary_layer
    from .phase_plane import transonic_point

    tp = transonic_point(cfg.gas, cfg.far_field)
    bl = solve_boundary_layer(cfg.gas, tp, cfg.boundary)
    delta = bl.delta_tilde
    xs = np.geomspace(1e2 / delta, 1e4 / delta, 40)
    vals = bl.evaluate(xs)
    fit_u = decay_fit(xs, np.abs(vals.u - tp.u_star))
    fit_ux = decay_fit(xs, vals.u_x)
    grid_vals = bl.evaluate(np.linspace(0.0, 1e4 / delta, 20001))
    monotone = bool(np.all(grid_vals.u_x >= 0.0))
    report["bl-decay"] = {
        "exponent_u": fit_u.exponent,
        "exponent_ux": fit_ux.exponent,
        "monotone": monotone,
    }
    return (-1.15 <= fit_u.exponent <= -0.85) and (-2.2 <= fit_ux.exponent <= -1.8) \
        and monotone


def _check_fan_decay(cfg: RunConfig, report: dict) -> bool:
    background = cfg.make_background()
    fan = background.fan
    times = np.geomspace(10.0, 1000.0, 16)
    sup_vals, l2_vals, pins = [], [], []
    for t in times:
        x = np.unique(np.concatenate([
            np.linspace(0.0, fan.w_plus * (1.0 + t) + 800.0 / fan.rp.eps, 12000),
        ]))
        f = fan.evaluate(x, float(t))
        sup_vals.append(np.max(f.u_x))
        l2_vals.append(np.sqrt(np.trapezoid(f.u_x**2, x)))
        zero = fan.evaluate(0.0, float(t))
        pins.append(max(abs(zero.rho - fan.tp.rho_star), abs(zero.u - fan.tp.u_star)))
    fit_sup = decay_fit(times, sup_vals)
    fit_l2 = decay_fit(times, l2_vals)
    pin = max(pins)
    report["fan-decay"] = {
        "exponent_sup": fit_sup.exponent,
        "exponent_l2": fit_l2.exponent,
        "boundary_pin": pin,
    }
    return (-1.1 <= fit_sup.exponent <= -0.9) and (-0.6 <= fit_l2.exponent <= -0.4) \
        and pin <= 1e-8


def _check_source_envelopes(cfg: RunConfig, report: dict) -> bool:
    cw = cfg.make_background()
    times = np.geomspace(10.0, 1000.0, 30)
    combo = np.array([source_integrals(cw, float(t))["int_abs_f_plus_gvisc"]
                      for t in times])
    env = source_envelope(cw)(times)
    k, worst = envelope_fit(combo, env)
    g_sq = np.array([source_integrals(cw, float(t))["int_g_sq"] for t in times])
    fit_g = decay_fit(times, g_sq)
    report["source-envelopes"] = {
        "K": k, "worst_ratio": worst, "g_sq_exponent": fit_g.exponent,
    }
    return worst <= 1.1 and fit_g.exponent <= -1.6


def _check_bl_integrals(cfg: RunConfig, report: dict) -> bool:
    cw = cfg.make_background()
    result = appendix_scaling_check(cw, k=0, j=2)
    report["bl-integrals"] = {
        "delta_exponent": result.delta_exponent,
        "time_exponents": result.time_exponents,
    }
    return abs(result.delta_exponent - 1.0) <= 0.15


def cmd_verify_lemmas(args) -> int:
    cfg = _resolve_config(args)
    requested = args.lemma or list(LEMMA_CHECKS)
    checks = []
    for name in requested:
        resolved = _LEMMA_ALIASES.get(name, name)
        if resolved not in LEMMA_CHECKS:
            print(f"unknown check {name!r}; options: "
                  f"{sorted(set(LEMMA_CHECKS) | set(_LEMMA_ALIASES))}", file=sys.stderr)
            return 2
        if resolved not in checks:
            checks.append(resolved)

    runners = {
        "bl-decay": _check_bl_decay,
        "fan-decay": _check_fan_decay,
        "source-envelopes": _check_source_envelopes,
        "bl-integrals": _check_bl_integrals,
    }
    report: dict = {}
    ok = True
    for name in checks:
        passed = runners[name](cfg, report)
        print(f"{name}: {'PASS' if passed else 'FAIL'} {json.dumps(report[name], sort_keys=True)}")
        ok = ok and passed
    if not ok:
        return _fail({"reason": "lemma checks outside stated windows", "report": report})
    return 0


def cmd_verify_theorem(args) -> int:
    cfg = _resolve_config(args)
    background = cfg.make_background()
    try:
        result = run_simulation(
            cfg.gas, cfg.grid, cfg.sim, background,
            classification=cfg.classification(),
            out_dir=cfg.output_dir, config_echo=cfg.to_dict(),
        )
    except PositivityError as exc:
        return _fail({"reason": str(exc)})

    reports = {r.t: r for r in result.reports}

    def metric_at(t):
        r = reports.get(min(reports, key=lambda s: abs(s - t)))
        dist = max(r.sup_dist_rho_i, r.sup_dist_u_i, r.sup_dist_rho_e, r.sup_dist_u_e)
        return dist, r.sup_E

    d5, e5 = metric_at(5.0)
    dN, eN = metric_at(cfg.sim.t_final)
    tail = [r for r in result.reports if r.t >= 20.0]
    dist_series = [max(r.sup_dist_rho_i, r.sup_dist_u_i, r.sup_dist_rho_e, r.sup_dist_u_e)
                   for r in tail]
    ripple_ok = all(
        dist_series[i + 1] <= 1.02 * dist_series[i] + 1e-14
        for i in range(len(dist_series) - 1)
    )
    summary = {
        "sup_dist_t5": d5, "sup_dist_final": dN, "dist_ratio": dN / d5,
        "sup_E_t5": e5, "sup_E_final": eN,
        "E_ratio": eN / e5 if e5 > 0 else 0.0,
        "monotone_after_t20": ripple_ok,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    ok = summary["dist_ratio"] <= 0.1 and summary["E_ratio"] <= 0.1 and ripple_ok
    if not ok:
        return _fail({"reason": "time-asymptotic trend outside stated thresholds",
                      "summary": summary})
    print("trend check passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nsp-outflow",
        description="Composite boundary-layer/rarefaction waves for the "
        "two-fluid Navier-Stokes-Poisson outflow problem",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("classify", cmd_classify),
        ("build-profiles", cmd_build_profiles),
        ("simulate", cmd_simulate),
        ("verify-lemmas", cmd_verify_lemmas),
        ("verify-theorem", cmd_verify_theorem),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(func=fn)
        if name == "verify-lemmas":
            p.add_argument("--lemma", action="append",
                           help="check name (bl-decay, fan-decay, "
                           "source-envelopes, bl-integrals) or numeric alias")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        return _fail({"reason": str(exc)})


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
