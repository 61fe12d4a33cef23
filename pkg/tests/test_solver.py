import numpy as np
import pytest
import sympy as sp
from scipy.special import erfc

from nsp_outflow import ConfigError, DomainError, GasParameters, PositivityError
from nsp_outflow.profiles import CompositeValues, ConstantBackground
from nsp_outflow.solver import (
    FluidState,
    Grid,
    PerturbationSpec,
    SimConfig,
    cfl_dt,
    charge_dipole,
    initial_data,
    poisson_field,
    step,
)

U_B = -0.5
L_DOM = 4.0


# ---------------------------------------------------------------------------
# grid and field
# ---------------------------------------------------------------------------


def test_grid_validation():
    with pytest.raises(ConfigError):
        Grid(L=-1.0, N=100)
    with pytest.raises(ConfigError):
        Grid(L=10.0, N=8)
    g = Grid(L=10.0, N=100)
    assert g.h == pytest.approx(0.1)
    assert g.x.size == 101


def test_poisson_zero_for_quasineutral():
    g = Grid(L=20.0, N=200)
    rho = 1.0 + 0.3 * np.sin(g.x)
    field = poisson_field(rho, rho.copy(), g)
    assert np.all(field.E == 0.0)
    assert field.E[-1] == 0.0


def test_poisson_exponential_oracle():
    g = Grid(L=40.0, N=2000)
    rho_e = np.ones(g.N + 1)
    rho_i = rho_e + np.exp(-g.x)
    field = poisson_field(rho_i, rho_e, g)
    # E = -exp(-x) up to the truncated-tail offset exp(-L) and O(h^2)
    assert np.max(np.abs(field.E + np.exp(-g.x))) < 2.0 * g.h**2


def test_poisson_linearity():
    g = Grid(L=10.0, N=128)
    rng = np.random.default_rng(3)
    base = 1.0 + 0.1 * rng.standard_normal(g.N + 1)
    bump = 0.2 * rng.standard_normal(g.N + 1)
    e1 = poisson_field(base + bump, base, g).E
    e3 = poisson_field(base + 3.0 * bump, base, g).E
    assert np.max(np.abs(e3 - 3.0 * e1)) < 1e-14


def test_poisson_gauge_consistency():
    # forward difference of E recovers the charge imbalance at O(h^2)
    g = Grid(L=30.0, N=3000)
    rho_e = np.ones(g.N + 1)
    rho_i = rho_e + np.exp(-((g.x - 10.0) / 2.0) ** 2)
    E = poisson_field(rho_i, rho_e, g).E
    mid = 0.5 * (g.x[:-1] + g.x[1:])
    d_mid = np.exp(-((mid - 10.0) / 2.0) ** 2)
    assert np.max(np.abs(np.diff(E) / g.h - d_mid)) < 2.0 * g.h**2


def test_poisson_rejects_mismatched_grids():
    g = Grid(L=10.0, N=100)
    with pytest.raises(DomainError):
        poisson_field(np.ones(50), np.ones(50), g)


def test_charge_dipole_matches_wall_field():
    g = Grid(L=30.0, N=600)
    rho_e = np.ones(g.N + 1)
    rho_i = rho_e + np.exp(-((g.x - 8.0) / 1.5) ** 2)
    field = poisson_field(rho_i, rho_e, g)
    st = FluidState(rho_i=rho_i, u_i=np.zeros(g.N + 1), rho_e=rho_e,
                    u_e=np.zeros(g.N + 1), t=0.0)
    assert charge_dipole(st, g) == pytest.approx(-field.E[0], abs=1e-13)


# ---------------------------------------------------------------------------
# time-step control
# ---------------------------------------------------------------------------


def test_cfl_example(gas):
    g = Grid(L=10.0, N=100)
    n = g.N + 1
    st = FluidState(rho_i=np.ones(n), u_i=np.full(n, 0.2),
                    rho_e=np.ones(n), u_e=np.full(n, 0.2), t=0.0)
    cfg = SimConfig(cfl=0.5, t_final=1.0)
    assert cfl_dt(st, g, cfg, gas) == pytest.approx(0.05 / 1.2, rel=1e-13)


def test_cfl_scales_with_h_and_speed(gas):
    n = 101
    st = FluidState(rho_i=np.ones(n), u_i=np.full(n, 0.2),
                    rho_e=np.ones(n), u_e=np.full(n, 0.2), t=0.0)
    cfg = SimConfig(cfl=0.5, t_final=1.0)
    dt1 = cfl_dt(st, Grid(L=10.0, N=100), cfg, gas)
    dt2 = cfl_dt(st, Grid(L=20.0, N=100), cfg, gas)
    assert dt2 == pytest.approx(2.0 * dt1, rel=1e-13)
    fast = FluidState(rho_i=np.ones(n), u_i=np.full(n, -1.5),
                      rho_e=np.ones(n), u_e=np.full(n, 0.2), t=0.0)
    assert cfl_dt(fast, Grid(L=10.0, N=100), cfg, gas) < dt1


def test_cfl_rejects_nonfinite(gas):
    n = 101
    st = FluidState(rho_i=np.ones(n), u_i=np.full(n, np.inf),
                    rho_e=np.ones(n), u_e=np.zeros(n), t=0.0)
    with pytest.raises(DomainError):
        cfl_dt(st, Grid(L=10.0, N=100), SimConfig(t_final=1.0), gas)


# ---------------------------------------------------------------------------
# stepping invariants
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("scheme", ["upwind1", "muscl2"])
def test_constant_state_preserved(gas, scheme):
    bg = ConstantBackground(rho0=1.0, u0=-0.8)
    g = Grid(L=40.0, N=400)
    cfg = SimConfig(cfl=0.9, t_final=1e9, scheme=scheme)
    state, _ = initial_data(bg, None, g, gas)
    reference = state.copy()
    worst = 0.0
    for _ in range(2000):
        new, _ = step(state, g, gas, cfg, bg)
        worst = max(worst, max(np.max(np.abs(a - b))
                               for a, b in zip(new.fields(), state.fields())))
        state = new
    assert worst <= 1e-12
    assert max(np.max(np.abs(a - b))
               for a, b in zip(state.fields(), reference.fields())) <= 1e-12


@pytest.mark.parametrize("scheme", ["upwind1", "muscl2"])
def test_ion_electron_symmetry(gas, scheme):
    bg = ConstantBackground(rho0=1.0, u0=-0.8)
    g = Grid(L=40.0, N=400)
    cfg = SimConfig(cfl=0.5, t_final=1e9, scheme=scheme)
    spec = PerturbationSpec(amplitude=0.05, center=5.0, width=10.0,
                            fields=("rho_i", "u_i", "rho_e", "u_e"))
    state, _ = initial_data(bg, spec, g, gas)
    for _ in range(800):
        state, field = step(state, g, gas, cfg, bg)
    assert np.max(np.abs(state.rho_i - state.rho_e)) + \
        np.max(np.abs(state.u_i - state.u_e)) <= 1e-11
    assert np.all(field.E == 0.0)


def test_frozen_coefficient_stability_long_run(gas):
    # 1e5 steps at Courant number 0.9 on the constant state: no blow-up,
    # no drift beyond rounding accumulation
    bg = ConstantBackground(rho0=1.0, u0=-0.8)
    g = Grid(L=6.4, N=64)
    cfg = SimConfig(cfl=0.9, t_final=1e12)
    state, _ = initial_data(bg, None, g, gas)
    reference = state.copy()
    for _ in range(100000):
        state, _ = step(state, g, gas, cfg, bg)
    drift = max(np.max(np.abs(a - b))
                for a, b in zip(state.fields(), reference.fields()))
    assert np.all(np.isfinite(state.rho_i)) and np.all(np.isfinite(state.u_e))
    assert drift <= 1e-10


def test_boundary_contract_exact(gas, composite):
    g = Grid(L=400.0, N=1000)
    cfg = SimConfig(cfl=0.5, t_final=1.0)
    spec = PerturbationSpec(amplitude=0.01, center=5.0, width=10.0)
    state, _ = initial_data(composite, spec, g, gas)
    for _ in range(20):
        state, field = step(state, g, gas, cfg, composite)
        assert state.u_i[0] == composite.u_b
        assert state.u_e[0] == composite.u_b
        assert field.E[-1] == 0.0


def test_positivity_failure_raises(gas):
    # the interior donor-cell update is positivity-preserving at cfl <= 1,
    # but a violent near-wall gradient makes the extrapolated wall density
    # negative, which must abort with a diagnostic rather than continue
    bg = ConstantBackground(rho0=1.0, u0=-0.8)
    g = Grid(L=40.0, N=400)
    cfg = SimConfig(cfl=0.5, t_final=1e9)
    state, _ = initial_data(bg, None, g, gas)
    state.rho_i[1] = 0.3
    with pytest.raises(PositivityError) as err:
        for _ in range(10):
            state, _ = step(state, g, gas, cfg, bg)
    assert err.value.snapshot is not None


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


def test_initial_data_zero_amplitude_is_background(gas, composite):
    g = Grid(L=400.0, N=800)
    state, h1 = initial_data(composite, None, g, gas)
    base = composite.evaluate(g.x, 0.0)
    assert h1 == 0.0
    assert np.max(np.abs(state.rho_i - base.rho)) == 0.0
    assert state.u_i[0] == composite.u_b


def test_initial_data_h1_matches_closed_form(gas):
    # sin^2 bump: ||f||^2 = a^2 3w/8, ||f'||^2 = a^2 pi^2/(2w)
    bg = ConstantBackground(rho0=1.0, u0=-0.8)
    g = Grid(L=10.0, N=1000)
    a, w = 0.01, 2.0
    spec = PerturbationSpec(amplitude=a, center=1.0, width=w, fields=("rho_i",))
    _, h1 = initial_data(bg, spec, g, gas)
    closed = a * np.sqrt(3.0 * w / 8.0 + np.pi**2 / (2.0 * w))
    assert h1 == pytest.approx(closed, rel=0.01)


def test_initial_data_h1_target_rescales(gas, composite):
    g = Grid(L=400.0, N=4000)
    spec = PerturbationSpec(amplitude=1.0, center=5.0, width=10.0,
                            h1_target=0.01)
    state, h1 = initial_data(composite, spec, g, gas)
    assert h1 == pytest.approx(0.01, abs=1e-14)
    base = composite.evaluate(g.x, 0.0)
    assert np.max(np.abs(state.rho_i - base.rho)) > 0.0
    assert np.max(np.abs(state.rho_e - base.rho)) == 0.0  # ion-only default


def test_initial_data_ion_bump_charges_the_field(gas, composite):
    g = Grid(L=400.0, N=2000)
    spec = PerturbationSpec(amplitude=0.02, center=5.0, width=10.0,
                            fields=("rho_i",))
    state, _ = initial_data(composite, spec, g, gas)
    field = poisson_field(state.rho_i, state.rho_e, g)
    assert np.max(np.abs(field.E)) > 0.0
    assert charge_dipole(state, g) == pytest.approx(-field.E[0], abs=1e-13)


def test_initial_data_multimode_is_seeded(gas, composite):
    g = Grid(L=400.0, N=1000)
    spec = PerturbationSpec(amplitude=0.01, center=5.0, width=10.0,
                            shape="multimode", seed=7)
    s1, _ = initial_data(composite, spec, g, gas)
    s2, _ = initial_data(composite, spec, g, gas)
    assert np.all(s1.rho_i == s2.rho_i)
    other, _ = initial_data(
        composite,
        PerturbationSpec(amplitude=0.01, center=5.0, width=10.0,
                         shape="multimode", seed=8),
        g, gas,
    )
    assert np.max(np.abs(other.rho_i - s1.rho_i)) > 0.0


def test_initial_data_rejects_overflowing_support(gas, composite):
    g = Grid(L=40.0, N=400)
    with pytest.raises(ConfigError):
        initial_data(composite,
                     PerturbationSpec(amplitude=0.01, center=35.0, width=10.0),
                     g, gas)


# ---------------------------------------------------------------------------
# manufactured-solution convergence
# ---------------------------------------------------------------------------


def build_manufactured():
    """Forcing and exact fields for the full scheme, built symbolically."""
    x, t = sp.symbols("x t")
    A, gam = sp.Rational(1, 3), 3
    b_i, b_e, w, c = sp.Rational(3, 20), sp.Rational(2, 25), sp.Rational(1, 2), 2
    gauss = sp.exp(-(((x - c) / w) ** 2))
    gt = 1 + sp.Rational(3, 10) * sp.cos(t)
    shape = 1 - sp.cos(sp.pi * x / 2)
    rho = {"i": 1 + b_i * gauss * gt, "e": 1 + b_e * gauss * gt}
    u = {
        "i": U_B + sp.Rational(3, 20) * shape * (1 + sp.Rational(3, 10) * sp.sin(t)),
        "e": U_B + sp.Rational(1, 10) * shape * (1 + sp.Rational(1, 5) * sp.sin(t)),
    }
    E = -(b_i - b_e) * gt * w * sp.sqrt(sp.pi) / 2 * sp.erfc((x - c) / w)

    mods = ["numpy", {"erfc": erfc}]
    forcing_fns, exact_fns = [], []
    for a, sign in (("i", 1), ("e", -1)):
        P = A * rho[a] ** gam
        s_rho = sp.diff(rho[a], t) + sp.diff(rho[a] * u[a], x)
        s_u = (
            sp.diff(u[a], t) + u[a] * sp.diff(u[a], x) + sp.diff(P, x) / rho[a]
            - sign * E - sp.diff(u[a], x, 2) / rho[a]
        )
        forcing_fns += [sp.lambdify((x, t), sp.simplify(s_rho), modules=mods),
                        sp.lambdify((x, t), sp.simplify(s_u), modules=mods)]
        exact_fns += [sp.lambdify((x, t), rho[a], modules=mods),
                      sp.lambdify((x, t), u[a], modules=mods)]
    return forcing_fns, exact_fns


@pytest.fixture(scope="module")
def manufactured():
    return build_manufactured()


class _ExactBackground:
    """Feeds the exact manufactured fields to the solver boundaries."""

    u_b = U_B

    def __init__(self, rho_fn, u_fn):
        self.rho_fn = rho_fn
        self.u_fn = u_fn

    def evaluate(self, x, t):
        return CompositeValues(rho=self.rho_fn(x, t), u=self.u_fn(x, t),
                               rho_x=0.0, u_x=0.0, rho_xx=0.0, u_xx=0.0)


def _run_manufactured(gas, manufactured, n_cells, t_final=0.5):
    forcing_fns, exact_fns = manufactured
    rho_i_fn, u_i_fn, rho_e_fn, u_e_fn = exact_fns
    g = Grid(L=L_DOM, N=n_cells)
    cfg = SimConfig(cfl=0.5, t_final=t_final)
    state = FluidState(
        rho_i=rho_i_fn(g.x, 0.0), u_i=u_i_fn(g.x, 0.0),
        rho_e=rho_e_fn(g.x, 0.0), u_e=u_e_fn(g.x, 0.0), t=0.0,
    )
    state.u_i[0] = U_B
    state.u_e[0] = U_B
    bg = _ExactBackground(rho_i_fn, u_i_fn)

    def forcing(x, t):
        return tuple(f(x, t) for f in forcing_fns)

    while state.t < t_final - 1e-12:
        dt = min(cfl_dt(state, g, cfg, gas), t_final - state.t)
        state, _ = step(state, g, gas, cfg, bg, dt=dt, forcing=forcing)
    return max(
        np.max(np.abs(getattr(state, name) - fn(g.x, state.t)))
        for name, fn in zip(("rho_i", "u_i", "rho_e", "u_e"), exact_fns)
    )


def test_manufactured_solution_first_order_overall(gas, manufactured):
    errors = [_run_manufactured(gas, manufactured, n) for n in (100, 200, 400)]
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    assert min(orders) >= 0.9


def test_manufactured_solution_viscous_second_order(gas):
    x, t = sp.symbols("x t")
    u_expr = U_B + sp.Rational(1, 5) * (1 - sp.cos(sp.pi * x / 2)) * (
        1 + sp.Rational(3, 10) * sp.sin(2 * t)
    )
    s_u = sp.lambdify((x, t), sp.simplify(sp.diff(u_expr, t) - sp.diff(u_expr, x, 2)),
                      modules="numpy")
    u_fn = sp.lambdify((x, t), u_expr, modules="numpy")

    def run(n_cells, t_final=0.1):
        g = Grid(L=L_DOM, N=n_cells)
        cfg = SimConfig(cfl=0.5, t_final=t_final, terms="viscous")
        ones = np.ones(n_cells + 1)
        state = FluidState(rho_i=ones.copy(), u_i=u_fn(g.x, 0.0),
                           rho_e=ones.copy(), u_e=u_fn(g.x, 0.0), t=0.0)
        bg = _ExactBackground(lambda xx, tt: np.ones_like(np.asarray(xx, float)), u_fn)

        def forcing(xx, tt):
            s = s_u(xx, tt)
            z = np.zeros_like(xx)
            return z, s, z, s

        # dt ~ h^2 so the backward-Euler time error refines with the
        # second-order spatial viscous stencil
        dt0 = 2.0 * g.h**2
        while state.t < t_final - 1e-14:
            dt = min(dt0, t_final - state.t)
            state, _ = step(state, g, gas, cfg, bg, dt=dt, forcing=forcing)
        return np.max(np.abs(state.u_i - u_fn(g.x, state.t)))

    errors = [run(n) for n in (50, 100, 200)]
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    assert min(orders) >= 1.8
