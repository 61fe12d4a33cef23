"""Acceptance suite.

Canonical configuration throughout: A = 1/3, gamma = 3, far field
(rho+, u+) = (1, 0.2), wall velocity u_b = -0.8, mollifier q = 10,
eps = 0.1, domain L = 400 with N = 4000 cells, Courant number 0.5.

Each criterion prints one PASS/FAIL line (written to the real stderr so
the lines survive pytest capture) and then asserts.  Four clauses are
implemented verbatim but are unreachable at the canonical parameters, and
they are left red rather than loosened:

* criterion 3: the fan's fitted decay exponents over t in [10, 1e3] are
  -0.58 (sup) and -0.26 (L2); the mollifier ramp (extent ~ q/eps = 100)
  keeps the fan out of its asymptotic regime until t ~ 70, so the stated
  windows around -1 and -0.5 cannot be met at eps = 0.1 (they are met for
  t >> 1e3, see the module tests in test_diagnostics.py).
* criterion 4: the single least-squares constant leaves a worst residual
  ratio ~1.7 (bound shape mismatch in the crossover region) and the
  quadratic source norm fits to -1.22 over [10, 1e3]; the same integrals
  obey their envelopes with unit constant (test_diagnostics.py) and reach
  the -1.6 rate for t > 2e3.
* criterion 6, ratio clause: the smooth fan differs from the exact fan by
  ~0.55 (in characteristic value) at t = 200 against ~1.2 at t = 5, so the
  distance ratio is ~0.46 regardless of solver quality; reaching 10%
  needs t ~ 2000 at eps = 0.1.  The field ratio and the monotone-decay
  clause pass.
* criterion 7: at strengths {0.1, 0.2, 0.4} the layer integral's fitted
  strength exponent is 1.32 (cubic corrections to the profile equation are
  order strength); the stated 1 +- 0.15 window holds for strengths below
  ~0.05 (verified in test_diagnostics.py with an independent quadrature).

See the README acceptance-status section for the full analysis.
"""

import time

import numpy as np
import pytest

from nsp_outflow import (
    FarField,
    GasParameters,
    transonic_point,
    transonic_point_bisection,
)
from nsp_outflow.config import from_dict, preset
from nsp_outflow.diagnostics import (
    bl_integral_delta_exponent,
    decay_fit,
    envelope_fit,
    source_envelope,
    source_integrals,
)
from nsp_outflow.gas import sound_speed
from nsp_outflow.runner import run_simulation


#: collected criterion lines; echoed by the terminal-summary hook in
#: conftest.py so they appear even for passing tests under capture
ACCEPTANCE_LINES: list[str] = []


def _report(criterion: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} — {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def canonical():
    return preset("caseIV-2")


def test_criterion_1_transonic_solver(canonical):
    t0 = time.time()
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        gamma = rng.uniform(1.05, 3.0)
        p = GasParameters(A=rng.uniform(0.1, 2.0), gamma=gamma)
        rho_plus = rng.uniform(0.2, 5.0)
        c_plus = sound_speed(p, rho_plus)
        # admissible: the fan from the far field must reach the sonic line
        u_plus = rng.uniform(
            -0.9 * c_plus, 0.9 * min(2.0 * c_plus / (gamma - 1.0), 3.0 * c_plus)
        )
        ff = FarField(rho_plus, u_plus)
        tp, tpb = transonic_point(p, ff), transonic_point_bisection(p, ff)
        worst = max(worst,
                    abs(tp.v_star - tpb.v_star) / tp.v_star,
                    abs(tp.u_star - tpb.u_star) / max(abs(tp.u_star), 1.0))
    tp = transonic_point(canonical.gas, canonical.far_field)
    exact = max(abs(tp.rho_star - 0.4), abs(tp.u_star - (-0.4)))
    elapsed = time.time() - t0
    ok = worst <= 1e-10 and exact <= 1e-12 and elapsed < 1.0
    _report("1 transonic-solver", ok,
            f"worst agreement {worst:.2e} (<=1e-10), canonical offset "
            f"{exact:.1e} (<=1e-12), {elapsed:.2f}s (<1s)")
    assert ok


def test_criterion_2_boundary_layer_decay(canonical):
    t0 = time.time()
    cw = canonical.make_background()
    delta = cw.bl.delta_tilde
    xs = np.geomspace(1e2 / delta, 1e4 / delta, 40)
    vals = cw.bl.evaluate(xs)
    slope_u = np.polyfit(np.log(xs), np.log(np.abs(vals.u - cw.tp.u_star)), 1)[0]
    slope_ux = np.polyfit(np.log(xs), np.log(vals.u_x), 1)[0]
    dense = cw.bl.evaluate(np.linspace(0.0, 1e4 / delta, 40001))
    monotone = bool(np.all(dense.u_x >= 0.0))
    elapsed = time.time() - t0
    ok = (-1.15 <= slope_u <= -0.85) and (-2.2 <= slope_ux <= -1.8) \
        and monotone and elapsed < 10.0
    _report("2 boundary-layer-decay", ok,
            f"exponents {slope_u:.3f} (in [-1.15,-0.85]) and {slope_ux:.3f} "
            f"(in [-2.2,-1.8]), monotone={monotone}, {elapsed:.1f}s (<10s)")
    assert ok


def test_criterion_3_rarefaction_decay(canonical):
    t0 = time.time()
    fan = canonical.make_background().fan
    times = np.geomspace(10.0, 1000.0, 16)
    sups, l2s, pins = [], [], []
    for t in times:
        x = np.linspace(0.0, fan.w_plus * (1.0 + t) + 800.0 / fan.rp.eps, 12000)
        f = fan.evaluate(x, float(t))
        sups.append(np.max(f.u_x))
        l2s.append(np.sqrt(np.trapezoid(f.u_x**2, x)))
        z = fan.evaluate(0.0, float(t))
        pins.append(max(abs(z.rho - fan.tp.rho_star), abs(z.u - fan.tp.u_star)))
    fit_sup = decay_fit(times, sups).exponent
    fit_l2 = decay_fit(times, l2s).exponent
    pin = max(pins)
    elapsed = time.time() - t0
    ok = (-1.1 <= fit_sup <= -0.9) and (-0.6 <= fit_l2 <= -0.4) \
        and pin <= 1e-8 and elapsed < 30.0
    _report("3 rarefaction-decay", ok,
            f"sup exponent {fit_sup:.3f} (in [-1.1,-0.9]), L2 exponent "
            f"{fit_l2:.3f} (in [-0.6,-0.4]), boundary pin {pin:.1e} (<=1e-8), "
            f"{elapsed:.1f}s (<30s)")
    assert ok


def test_criterion_4_source_envelopes(canonical):
    t0 = time.time()
    cw = canonical.make_background()
    times = np.geomspace(10.0, 1000.0, 30)
    combo, g_sq = [], []
    for t in times:
        ints = source_integrals(cw, float(t))
        combo.append(ints["int_abs_f_plus_gvisc"])
        g_sq.append(ints["int_g_sq"])
    env = source_envelope(cw)(times)
    k_fit, worst = envelope_fit(np.array(combo), env)
    g_exp = decay_fit(times, g_sq).exponent
    elapsed = time.time() - t0
    ok = worst <= 1.1 and g_exp <= -1.6 and elapsed < 60.0
    _report("4 source-envelopes", ok,
            f"worst residual ratio {worst:.3f} (<=1.1, K={k_fit:.3f}), "
            f"quadratic-norm exponent {g_exp:.3f} (<=-1.6), {elapsed:.1f}s (<1min)")
    assert ok


def test_criterion_5_solver_sanity(canonical):
    from nsp_outflow.profiles import ConstantBackground
    from nsp_outflow.solver import Grid, PerturbationSpec, SimConfig, initial_data, step

    t0 = time.time()
    gas = canonical.gas
    bg = ConstantBackground(rho0=1.0, u0=-0.8)
    grid = Grid(L=40.0, N=400)
    cfg = SimConfig(cfl=0.5, t_final=1e9)

    state, _ = initial_data(bg, None, grid, gas)
    drift = 0.0
    for _ in range(10000):
        new, _ = step(state, grid, gas, cfg, bg)
        drift = max(drift, max(np.max(np.abs(a - b))
                               for a, b in zip(new.fields(), state.fields())))
        state = new
    const_ok = drift <= 1e-12

    spec = PerturbationSpec(amplitude=0.05, center=5.0, width=10.0,
                            fields=("rho_i", "u_i", "rho_e", "u_e"))
    state, _ = initial_data(bg, spec, grid, gas)
    sym = 0.0
    e_sup = 0.0
    for _ in range(10000):
        state, field = step(state, grid, gas, cfg, bg)
        sym = max(sym, np.max(np.abs(state.rho_i - state.rho_e))
                  + np.max(np.abs(state.u_i - state.u_e)))
        e_sup = max(e_sup, np.max(np.abs(field.E)))
    sym_ok = sym <= 1e-11 and e_sup == 0.0

    import test_solver as ts

    manufactured = ts.build_manufactured()
    errors = [ts._run_manufactured(gas, manufactured, n) for n in (100, 200, 400)]
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    overall_ok = min(orders) >= 0.9

    # viscous-only order via the dedicated test body
    import sympy as sp

    x, t = sp.symbols("x t")
    u_expr = ts.U_B + sp.Rational(1, 5) * (1 - sp.cos(sp.pi * x / 2)) * (
        1 + sp.Rational(3, 10) * sp.sin(2 * t)
    )
    s_u = sp.lambdify((x, t), sp.simplify(sp.diff(u_expr, t) - sp.diff(u_expr, x, 2)),
                      modules="numpy")
    u_fn = sp.lambdify((x, t), u_expr, modules="numpy")

    def run_visc(n_cells, t_final=0.1):
        g = Grid(L=4.0, N=n_cells)
        c = SimConfig(cfl=0.5, t_final=t_final, terms="viscous")
        ones = np.ones(n_cells + 1)
        st = ts.FluidState(rho_i=ones.copy(), u_i=u_fn(g.x, 0.0),
                           rho_e=ones.copy(), u_e=u_fn(g.x, 0.0), t=0.0)
        bgv = ts._ExactBackground(lambda xx, tt: np.ones_like(np.asarray(xx, float)), u_fn)

        def forcing(xx, tt):
            s = s_u(xx, tt)
            z = np.zeros_like(xx)
            return z, s, z, s

        dt0 = 2.0 * g.h**2
        while st.t < t_final - 1e-14:
            st, _ = step(st, g, gas, c, bgv, dt=min(dt0, t_final - st.t),
                         forcing=forcing)
        return np.max(np.abs(st.u_i - u_fn(g.x, st.t)))

    visc_errors = [run_visc(n) for n in (50, 100, 200)]
    visc_orders = [np.log2(visc_errors[i] / visc_errors[i + 1]) for i in range(2)]
    visc_ok = min(visc_orders) >= 1.8

    elapsed = time.time() - t0
    ok = const_ok and sym_ok and overall_ok and visc_ok and elapsed < 300.0
    _report("5 solver-sanity", ok,
            f"constant drift {drift:.1e}/step (<=1e-12), symmetry {sym:.1e} "
            f"(<=1e-11, E==0), orders {min(orders):.2f} (>=0.9 overall) / "
            f"{min(visc_orders):.2f} (>=1.8 viscous), {elapsed:.0f}s (<5min)")
    assert ok


def test_criterion_6_theorem_trend(canonical):
    t0 = time.time()
    cfg = canonical
    background = cfg.make_background()
    result = run_simulation(cfg.gas, cfg.grid, cfg.sim, background,
                            classification=cfg.classification())
    reports = {round(r.t, 9): r for r in result.reports}

    def dist(r):
        return max(r.sup_dist_rho_i, r.sup_dist_u_i, r.sup_dist_rho_e, r.sup_dist_u_e)

    r5, r200 = reports[5.0], reports[200.0]
    ratios = {
        "rho_i": r200.sup_dist_rho_i / r5.sup_dist_rho_i,
        "u_i": r200.sup_dist_u_i / r5.sup_dist_u_i,
        "rho_e": r200.sup_dist_rho_e / r5.sup_dist_rho_e,
        "u_e": r200.sup_dist_u_e / r5.sup_dist_u_e,
        "E": r200.sup_E / r5.sup_E,
    }
    tail = [r for r in result.reports if r.t >= 20.0]
    series = [dist(r) for r in tail]
    monotone = all(series[i + 1] <= 1.02 * series[i] + 1e-14
                   for i in range(len(series) - 1))
    elapsed = time.time() - t0
    ok = all(v <= 0.1 for v in ratios.values()) and monotone and elapsed < 900.0
    _report("6 theorem-trend", ok,
            f"t200/t5 ratios sup-dist {max(ratios[k] for k in ('rho_i','u_i','rho_e','u_e')):.3f} "
            f"(<=0.1 each), field {ratios['E']:.2e} (<=0.1), monotone after "
            f"t=20 (2% ripple)={monotone}, {elapsed:.0f}s (<15min)")
    assert ok


def test_criterion_7_layer_integral_scaling(canonical):
    t0 = time.time()
    tp = transonic_point(canonical.gas, canonical.far_field)
    exponent, values = bl_integral_delta_exponent(canonical.gas, tp, k=0, j=2,
                                                  deltas=(0.1, 0.2, 0.4))
    elapsed = time.time() - t0
    ok = abs(exponent - 1.0) <= 0.15 and elapsed < 30.0
    _report("7 layer-integral-scaling", ok,
            f"strength exponent {exponent:.3f} (1 +- 0.15) over strengths "
            f"{{0.1, 0.2, 0.4}}, {elapsed:.1f}s (<30s)")
    assert ok
