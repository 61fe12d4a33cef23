"""Runtime diagnostics: perturbation fields, energy functionals, the
time-asymptotic convergence metrics, and the decay/scaling fits that turn
the construction's analytic envelopes into numerical checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError
from .gas import GasParameters, d_pressure, phi_potential
from .norms import forward_diff, h1_norm, l2_norm, sup_norm
from .phase_plane import BoundaryData, TransonicPoint
from .profiles import (
    CompositeWave,
    exact_rarefaction_state,
    solve_boundary_layer,
)
from .solver import FieldState, FluidState, Grid


@dataclass
class PerturbationFields:
    """Deviations of both fluids from the background wave."""

    phi_i: np.ndarray
    psi_i: np.ndarray
    phi_e: np.ndarray
    psi_e: np.ndarray

    def pairs(self):
        return (("phi_i", self.phi_i), ("psi_i", self.psi_i),
                ("phi_e", self.phi_e), ("psi_e", self.psi_e))


def perturbation(state: FluidState, background, grid: Grid) -> PerturbationFields:
    """Pointwise deviation of the state from the background at state.t."""
    base = background.evaluate(grid.x, state.t)
    return PerturbationFields(
        phi_i=state.rho_i - base.rho,
        psi_i=state.u_i - base.u,
        phi_e=state.rho_e - base.rho,
        psi_e=state.u_e - base.u,
    )


def perturbation_sources(state: FluidState, background, grid: Grid, gas: GasParameters):
    """Source terms of the perturbation equations for both fluids.

    Returns (f_i, g_i, f_e, g_e); each combines the background gradients
    acting on the perturbation with the background's own residual sources.
    """
    base = background.evaluate(grid.x, state.t)
    f_hat, g_hat = background.sources(grid.x, state.t)
    pert = perturbation(state, background, grid)
    pp_hat = d_pressure(gas, base.rho)
    dP_hat = pp_hat * base.rho_x

    out = []
    for rho, phi, psi in (
        (state.rho_i, pert.phi_i, pert.psi_i),
        (state.rho_e, pert.phi_e, pert.psi_e),
    ):
        f = base.u_x * phi + base.rho_x * psi + f_hat
        g = (
            rho * base.u_x * psi
            + base.rho_x * (d_pressure(gas, rho) - pp_hat)
            + (base.u_xx - dP_hat) * phi / base.rho
            + g_hat * rho / base.rho
        )
        out.extend([f, g])
    return tuple(out)


@dataclass
class TheoremMetrics:
    """Sup-norm distances to the exact composite target (layer + exact fan)."""

    sup_dist_rho_i: float
    sup_dist_u_i: float
    sup_dist_rho_e: float
    sup_dist_u_e: float
    sup_E: float


def theorem_metrics(
    state: FluidState, field: FieldState, composite: CompositeWave, grid: Grid
) -> TheoremMetrics | None:
    """Distances of the state from layer + exact self-similar fan - corner.

    The target uses the exact fan at x/t, so it is undefined at t = 0;
    None is returned there.
    """
    if state.t <= 0.0:
        return None
    bl = composite.bl.evaluate(grid.x)
    fan_rho, fan_u = exact_rarefaction_state(
        composite.gas, composite.tp, composite.ff, grid.x / state.t
    )
    target_rho = bl.rho + fan_rho - composite.tp.rho_star
    target_u = bl.u + fan_u - composite.tp.u_star
    return TheoremMetrics(
        sup_dist_rho_i=sup_norm(state.rho_i - target_rho),
        sup_dist_u_i=sup_norm(state.u_i - target_u),
        sup_dist_rho_e=sup_norm(state.rho_e - target_rho),
        sup_dist_u_e=sup_norm(state.u_e - target_u),
        sup_E=sup_norm(field.E),
    )


@dataclass
class EnergyReport:
    """Discrete energy functionals and norms at one time level.

    ``trace_*`` entries are the squared boundary traces entering the
    energy balance; sup distances refer to the exact composite target and
    are NaN at t = 0 where the fan is undefined.
    """

    t: float
    energy_total: float
    cross_term: float
    modified_energy: float
    diss_psi: float
    diss_weighted: float
    trace_phi_i0: float
    trace_phi_e0: float
    trace_E0: float
    h1_phi_i: float
    h1_psi_i: float
    h1_phi_e: float
    h1_psi_e: float
    sup_dist_rho_i: float
    sup_dist_u_i: float
    sup_dist_rho_e: float
    sup_dist_u_e: float
    sup_E: float
    sobolev_ratio: float


def _sobolev_ratio(fields, h: float) -> float:
    """max over fields of ||f||_inf^2 / (2 ||f|| ||f_x||); <= 1 in the limit."""
    worst = 0.0
    for f in fields:
        num = sup_norm(f) ** 2
        den = 2.0 * l2_norm(f, h) * l2_norm(forward_diff(f, h), h)
        if den > 1e-30:
            worst = max(worst, num / den)
    return worst


def energy_report(
    state: FluidState,
    background,
    field: FieldState,
    grid: Grid,
    gas: GasParameters,
) -> EnergyReport:
    """Trapezoid quadrature of every tracked functional at one time level."""
    h = grid.h
    base = background.evaluate(grid.x, state.t)
    pert = perturbation(state, background, grid)

    eta_i = state.rho_i * phi_potential(gas, state.rho_i, base.rho) \
        + 0.5 * state.rho_i * pert.psi_i**2
    eta_e = state.rho_e * phi_potential(gas, state.rho_e, base.rho) \
        + 0.5 * state.rho_e * pert.psi_e**2
    energy_total = float(np.trapezoid(eta_i + eta_e + 0.5 * field.E**2, dx=h))
    cross = 0.25 * float(
        np.trapezoid(base.u_x * (pert.psi_i - pert.psi_e) * field.E, dx=h)
    )

    diss_psi = l2_norm(forward_diff(pert.psi_i, h), h) ** 2 \
        + l2_norm(forward_diff(pert.psi_e, h), h) ** 2
    diss_weighted = float(np.trapezoid(
        base.u_x * (pert.phi_i**2 + pert.psi_i**2 + pert.phi_e**2 + pert.psi_e**2),
        dx=h,
    ))

    metrics = None
    if isinstance(background, CompositeWave):
        metrics = theorem_metrics(state, field, background, grid)
    nan = float("nan")
    return EnergyReport(
        t=state.t,
        energy_total=energy_total,
        cross_term=cross,
        modified_energy=energy_total - cross,
        diss_psi=diss_psi,
        diss_weighted=diss_weighted,
        trace_phi_i0=float(pert.phi_i[0] ** 2),
        trace_phi_e0=float(pert.phi_e[0] ** 2),
        trace_E0=float(field.E[0] ** 2),
        h1_phi_i=h1_norm(pert.phi_i, h),
        h1_psi_i=h1_norm(pert.psi_i, h),
        h1_phi_e=h1_norm(pert.phi_e, h),
        h1_psi_e=h1_norm(pert.psi_e, h),
        sup_dist_rho_i=metrics.sup_dist_rho_i if metrics else nan,
        sup_dist_u_i=metrics.sup_dist_u_i if metrics else nan,
        sup_dist_rho_e=metrics.sup_dist_rho_e if metrics else nan,
        sup_dist_u_e=metrics.sup_dist_u_e if metrics else nan,
        sup_E=sup_norm(field.E),
        sobolev_ratio=_sobolev_ratio(
            [pert.phi_i, pert.psi_i, pert.phi_e, pert.psi_e], h
        ),
    )


def _second_diff(f: np.ndarray, h: float) -> np.ndarray:
    d = np.zeros_like(f)
    d[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    d[0] = d[1]
    d[-1] = d[-2]
    return d


def energy_budget_terms(
    state: FluidState,
    background,
    field: FieldState,
    grid: Grid,
    gas: GasParameters,
) -> dict:
    """Modified energy plus the moduli of the terms that feed it.

    Between snapshots the modified energy may grow by at most the time
    integral of ``source_budget`` (all other terms in its balance law are
    sign-definite for small perturbations), which is what the budget
    property test asserts.
    """
    h = grid.h
    x = grid.x
    base = background.evaluate(x, state.t)
    fan = background.fan.evaluate(x, state.t)
    pert = perturbation(state, background, grid)
    f_hat, g_hat = background.sources(x, state.t)
    _, g_i, _, g_e = perturbation_sources(state, background, grid, gas)

    def integral(values) -> float:
        return float(np.trapezoid(values, dx=h))

    psi_d = pert.psi_i - pert.psi_e
    q1 = -integral(base.u_xx * (pert.phi_i * pert.psi_i + pert.phi_e * pert.psi_e)
                   / base.rho)
    q2 = -integral(g_hat * (state.rho_i * pert.psi_i + state.rho_e * pert.psi_e)
                   / base.rho)
    q3 = -integral(d_pressure(gas, base.rho) * f_hat * (pert.phi_i + pert.phi_e)
                   / base.rho)
    i4 = -0.25 * integral(psi_d * field.E * fan.u_xt)
    i5 = 0.25 * integral(
        (state.u_i * forward_diff(pert.psi_i, h) - state.u_e * forward_diff(pert.psi_e, h))
        * field.E * base.u_x
    )
    i6 = -0.25 * integral(
        (_second_diff(pert.psi_i, h) / state.rho_i
         - _second_diff(pert.psi_e, h) / state.rho_e) * field.E * base.u_x
    )
    i7 = 0.25 * integral(
        (d_pressure(gas, state.rho_i) / state.rho_i * forward_diff(pert.phi_i, h)
         - d_pressure(gas, state.rho_e) / state.rho_e * forward_diff(pert.phi_e, h))
        * field.E * base.u_x
    )
    i8 = 0.25 * integral((g_i / state.rho_i - g_e / state.rho_e) * field.E * base.u_x)
    i11 = 0.25 * integral(
        base.u_x * (pert.psi_e - pert.psi_i) * (pert.phi_e - pert.phi_i) * base.u
    )

    report = energy_report(state, background, field, grid, gas)
    terms = {"Q1": q1, "Q2": q2, "Q3": q3, "I4": i4, "I5": i5, "I6": i6,
             "I7": i7, "I8": i8, "I11": i11}
    return {
        "t": state.t,
        "modified_energy": report.modified_energy,
        "terms": terms,
        "source_budget": sum(abs(v) for v in terms.values()),
    }


@dataclass(frozen=True)
class DecayFit:
    """Least-squares power-law fit in log-log coordinates."""

    exponent: float
    intercept: float
    r_squared: float
    window: tuple[float, float]


def decay_fit(times, values, window: tuple[float, float] | None = None) -> DecayFit:
    """Fit value ~ C * t**exponent over the requested window.

    Requires at least 8 samples spanning at least one decade, all positive.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, v = t[keep], v[keep]
    if t.size < 8:
        raise FitError(f"need at least 8 samples in the window, got {t.size}")
    if t.max() < 10.0 * t.min():
        raise FitError("fit window must span at least one decade")
    if np.any(v <= 0.0) or np.any(~np.isfinite(v)):
        raise FitError("decay fit needs positive finite values")
    lt, lv = np.log(t), np.log(v)
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(
        exponent=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        window=(float(t.min()), float(t.max())),
    )


def _loglog_slope(xs, ys) -> float:
    """Plain least-squares slope for short series (no sample-count guard)."""
    return float(np.polyfit(np.log(np.asarray(xs, float)),
                            np.log(np.asarray(ys, float)), 1)[0])


def bl_weighted_integral(blp, k: int, j: int) -> float:
    """Integral over the half line of |d^k/dx^k (u - u*)|**j for the layer."""
    if (k + 1) * j <= 1:
        raise DomainError("the layer integral needs (k+1)*j > 1 to converge")
    if k not in (0, 1):
        raise DomainError("only derivative orders k in {0, 1} are supported")
    delta = blp.delta_tilde
    if delta == 0.0:
        return 0.0
    x = np.unique(np.concatenate([
        np.linspace(0.0, 50.0 / delta, 4000),
        np.geomspace(50.0 / delta, 1e8, 4000),
    ]))
    vals = blp.evaluate(x)
    integrand = np.abs(vals.u - blp.tp.u_star) if k == 0 else np.abs(vals.u_x)
    return float(np.trapezoid(integrand**j, x))


def bl_integral_delta_exponent(
    p: GasParameters,
    tp: TransonicPoint,
    k: int,
    j: int,
    deltas=(0.1, 0.2, 0.4),
) -> tuple[float, dict]:
    """Rebuild the layer across strengths and fit the strength exponent of
    the weighted integral; the analytic envelope gives (k+1)*j - 1."""
    values = {}
    for delta in deltas:
        blp = solve_boundary_layer(p, tp, BoundaryData(tp.u_star - delta))
        values[delta] = bl_weighted_integral(blp, k, j)
    exponent = _loglog_slope(list(values), list(values.values()))
    return exponent, values


def _source_grid(cw: CompositeWave, t: float) -> np.ndarray:
    """Quadrature nodes resolving both the layer scale and the moving fan."""
    from scipy.special import gammaincinv

    rp = cw.fan.rp
    ramp = float(gammaincinv(rp.q + 1.0, 1.0 - 1e-12)) / rp.eps
    delta = max(cw.bl.delta_tilde, 1e-3)
    x_right = cw.fan.w_plus * (1.0 + t) + ramp + 50.0 / delta
    near = np.linspace(0.0, min(50.0 / delta, x_right), 3000)
    far = np.geomspace(max(near[1], 1e-6), x_right, 5000)
    return np.unique(np.concatenate([near, far]))


def source_integrals(cw: CompositeWave, t: float) -> dict:
    """Integral norms of the composite's residual sources at one time."""
    x = _source_grid(cw, t)
    f_hat, g_hat = cw.sources(x, t)
    fan_uxx = cw.fan.evaluate(x, t).u_xx
    fx = cw.source_gradient(x, t)
    return {
        "int_abs_f": float(np.trapezoid(np.abs(f_hat), x)),
        "int_abs_f_plus_gvisc": float(
            np.trapezoid(np.abs(f_hat) + np.abs(g_hat + fan_uxx), x)
        ),
        "int_g_sq": float(np.trapezoid(g_hat**2, x)),
        "int_fx_sq": float(np.trapezoid(fx**2, x)),
    }


def envelope_fit(values, envelope) -> tuple[float, float]:
    """Single multiplicative constant K from least squares, and the worst
    residual ratio value / (K * envelope)."""
    v = np.asarray(values, dtype=float)
    e = np.asarray(envelope, dtype=float)
    k = float(np.sum(v * e) / np.sum(e * e))
    return k, float(np.max(v / (k * e)))


def source_envelope(cw: CompositeWave, theta: float = 0.125):
    """Analytic decay envelope of the combined first-order source norm."""
    delta = cw.bl.delta_tilde
    eps = cw.fan.rp.eps

    def env(t):
        t = np.asarray(t, dtype=float)
        return delta / (1.0 + delta * t) + eps**theta * (1.0 + t) ** (
            -(1.0 - theta)
        ) * np.log(1.0 + delta * t)

    return env


@dataclass(frozen=True)
class AppendixScalingReport:
    delta_exponent: float
    delta_values: dict
    time_exponents: dict
    times: tuple


def appendix_scaling_check(
    cw: CompositeWave,
    k: int = 0,
    j: int = 2,
    deltas=(0.1, 0.2, 0.4),
    times=None,
) -> AppendixScalingReport:
    """Scaling checks on the layer integrals and on the source norms.

    Fits the layer-strength exponent of the weighted layer integral
    (rebuilding the layer per strength) and the time exponents of the
    source norms; the companion envelopes say what to expect of each.
    """
    delta_exp, delta_vals = bl_integral_delta_exponent(cw.gas, cw.tp, k, j, deltas)
    if times is None:
        times = tuple(np.geomspace(10.0, 1000.0, 13))
    series = {name: [] for name in ("int_abs_f", "int_g_sq", "int_fx_sq")}
    for t in times:
        ints = source_integrals(cw, float(t))
        for name in series:
            series[name].append(ints[name])
    time_exponents = {
        name: _loglog_slope(times, vals) for name, vals in series.items()
    }
    return AppendixScalingReport(
        delta_exponent=delta_exp,
        delta_values=delta_vals,
        time_exponents=time_exponents,
        times=tuple(float(t) for t in times),
    )
