"""Asymptotic building blocks of the outflow problem.

Three objects are constructed here:

* the stationary degenerate boundary layer on x >= 0, obtained by
  integrating the first integral of the steady quasineutral momentum
  balance and continuing its algebraic tail analytically;
* the smooth approximate rarefaction: Burgers' equation solved by the
  method of characteristics from monotone mollified data (an incomplete
  gamma ramp), mapped to gas states along the 2-rarefaction curve;
* their superposition (the composite wave), with the residual source
  terms it leaves in the single-fluid equations.

All evaluators are vectorized over x and immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammainc, gammaln

from .errors import ClassificationError, ConvergenceError, DomainError
from .gas import (
    GasParameters,
    d_pressure,
    density_from_sound_speed,
    pressure,
    riemann_invariant_2,
    sound_speed,
)
from .phase_plane import (
    BoundaryData,
    FarField,
    TransonicPoint,
    WaveStrengths,
    classify,
    wave_strengths,
)

#: Layer strengths below this are treated as exactly degenerate.
DEGENERATE_TOL = 1e-14

#: The ODE integration hands over to the calibrated algebraic tail once
#: |u - u*| has dropped to this fraction of the layer strength.
TAIL_SWITCH_FRACTION = 1e-6


def _shaped(out: np.ndarray, template):
    out = np.asarray(out)
    if np.ndim(template) == 0:
        return float(out.reshape(()))
    return out.reshape(np.shape(template))


# ---------------------------------------------------------------------------
# Stationary boundary layer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileValues:
    """Boundary-layer fields at the requested points."""

    u: np.ndarray
    rho: np.ndarray
    u_x: np.ndarray
    rho_x: np.ndarray
    u_xx: np.ndarray
    rho_xx: np.ndarray


@dataclass(frozen=True)
class BoundaryLayerProfile:
    """Stationary layer connecting (rho_b, u_b) at the wall to the sonic

    corner state (rho*, u*) at infinity, with constant mass flux
    m = rho*u*.  The velocity is monotonically increasing and approaches
    u* algebraically (the fixed point of the profile ODE is degenerate).
    """

    gas: GasParameters
    tp: TransonicPoint
    u_b: float
    mass_flux: float
    delta_tilde: float
    #: x past which the calibrated tail u* - 1/(kappa*(x-x0) + 1/y0) is used
    x_switch: float
    y_switch: float
    kappa: float
    _dense: object = field(repr=False, default=None)

    @property
    def rho_b(self) -> float:
        return self.mass_flux / self.u_b

    def _rhs(self, u):
        """First integral of the steady momentum balance: du/dx at velocity u."""
        p, tp = self.gas, self.tp
        return (
            self.mass_flux * (u - tp.u_star)
            + pressure(p, self.mass_flux / u)
            - pressure(p, tp.rho_star)
        )

    def _rhs_slope(self, u):
        """d/du of the first integral; vanishes at the sonic fixed point."""
        rho = self.mass_flux / np.asarray(u, dtype=float)
        c2 = d_pressure(self.gas, rho)
        return self.mass_flux * (1.0 - c2 / np.asarray(u, dtype=float) ** 2)

    def evaluate(self, x) -> ProfileValues:
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xa < 0.0):
            raise DomainError("the boundary layer lives on x >= 0")
        tp, m = self.tp, self.mass_flux

        if self.delta_tilde == 0.0:
            z = np.zeros_like(xa)
            vals = ProfileValues(
                u=np.full_like(xa, tp.u_star),
                rho=np.full_like(xa, tp.rho_star),
                u_x=z,
                rho_x=z.copy(),
                u_xx=z.copy(),
                rho_xx=z.copy(),
            )
            return self._reshape(vals, x)

        u = np.empty_like(xa)
        u_x = np.empty_like(xa)
        u_xx = np.empty_like(xa)
        inner = xa <= self.x_switch
        if np.any(inner):
            ui = self._dense(xa[inner])[0]
            u[inner] = ui
            u_x[inner] = self._rhs(ui)
            u_xx[inner] = self._rhs_slope(ui) * u_x[inner]
        if np.any(~inner):
            # Exact solution of the leading-order tail ODE y' = -kappa*y**2,
            # matched to the last integrated point; avoids the catastrophic
            # cancellation the first integral suffers for tiny y.
            y = 1.0 / (self.kappa * (xa[~inner] - self.x_switch) + 1.0 / self.y_switch)
            u[~inner] = tp.u_star - y
            u_x[~inner] = self.kappa * y**2
            u_xx[~inner] = -2.0 * self.kappa**2 * y**3
        rho = m / u
        rho_x = -m * u_x / u**2
        rho_xx = -m * (u_xx / u**2 - 2.0 * u_x**2 / u**3)
        vals = ProfileValues(u=u, rho=rho, u_x=u_x, rho_x=rho_x, u_xx=u_xx, rho_xx=rho_xx)
        return self._reshape(vals, x)

    @staticmethod
    def _reshape(vals: ProfileValues, template) -> ProfileValues:
        return ProfileValues(
            **{k: _shaped(getattr(vals, k), template) for k in
               ("u", "rho", "u_x", "rho_x", "u_xx", "rho_xx")}
        )


def solve_boundary_layer(
    p: GasParameters,
    tp: TransonicPoint,
    bd: BoundaryData,
    x_max: float | None = None,
    tol: float = 1e-12,
) -> BoundaryLayerProfile:
    """Integrate the stationary layer from the wall toward the sonic corner.

    The profile ODE du/dx = m*(u - u*) + P(m/u) - P(rho*) has a double zero
    at u*, so adaptive integration runs until |u - u*| falls below
    ``TAIL_SWITCH_FRACTION`` of the layer strength (or until ``x_max``) and
    the remaining tail is the calibrated algebraic asymptote.
    """
    m = tp.rho_star * tp.u_star
    kappa = 0.5 * tp.rho_star * (p.gamma + 1.0)
    delta = abs(tp.u_star - bd.u_b)

    if delta <= DEGENERATE_TOL:
        return BoundaryLayerProfile(
            gas=p, tp=tp, u_b=tp.u_star, mass_flux=m, delta_tilde=0.0,
            x_switch=np.inf, y_switch=np.nan, kappa=kappa,
        )
    if not (bd.u_b < tp.u_star < 0.0):
        raise ClassificationError(
            f"boundary layer needs u_b < u* < 0, got u_b={bd.u_b:g}, u*={tp.u_star:g}"
        )

    profile = BoundaryLayerProfile(
        gas=p, tp=tp, u_b=bd.u_b, mass_flux=m, delta_tilde=delta,
        x_switch=np.inf, y_switch=np.nan, kappa=kappa,
    )

    probe = bd.u_b + (tp.u_star - bd.u_b) * np.linspace(1e-6, 1.0 - 1e-6, 257)
    if np.any(profile._rhs(probe) <= 0.0):
        raise ClassificationError(
            "the wall state is not connected to the sonic corner by a "
            "monotone layer (profile slope loses positivity)"
        )

    y_floor = TAIL_SWITCH_FRACTION * delta

    def close_to_corner(x, u):
        return (tp.u_star - u[0]) - y_floor

    close_to_corner.terminal = True
    close_to_corner.direction = -1.0

    span_end = x_max if x_max is not None else 1e16
    sol = solve_ivp(
        lambda x, u: profile._rhs(u),
        (0.0, span_end),
        [bd.u_b],
        method="DOP853",
        dense_output=True,
        events=close_to_corner,
        rtol=max(tol, 1e-13),
        atol=max(tol, 1e-13) * delta,
    )
    if not sol.success:
        raise ConvergenceError(f"boundary-layer integration failed: {sol.message}")

    x_switch = float(sol.t[-1])
    y_switch = float(tp.u_star - sol.y[0, -1])
    if y_switch <= 0.0:
        raise ConvergenceError("layer integration overshot the sonic corner")

    return BoundaryLayerProfile(
        gas=p, tp=tp, u_b=bd.u_b, mass_flux=m, delta_tilde=delta,
        x_switch=x_switch, y_switch=y_switch, kappa=kappa, _dense=sol.sol,
    )


# ---------------------------------------------------------------------------
# Mollified Burgers data and the method of characteristics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RarefactionParams:
    """Mollifier of the Burgers Riemann data.

    The data ramp from w- to w+ follows the regularized lower incomplete
    gamma function of order q+1 in eps*x, so q controls the flatness at the
    wall and eps the spatial extent of the ramp (~ q/eps).
    """

    q: int = 10
    eps: float = 0.1

    def __post_init__(self) -> None:
        if int(self.q) != self.q or self.q < 10:
            raise DomainError(f"mollifier exponent must be an integer >= 10, got {self.q}")
        if not 0.0 < self.eps <= 1.0:
            raise DomainError(f"steepness must lie in (0, 1], got eps={self.eps}")

    @property
    def normalizer(self) -> float:
        """1 / Gamma(q+1), so the ramp integral saturates at exactly 1."""
        return float(np.exp(-gammaln(self.q + 1.0)))


def mollified_initial_data(rp: RarefactionParams, w_minus: float, w_plus: float, x):
    """Monotone smooth data: w- for x <= 0, rising to w+ as x -> infinity."""
    if not w_minus < w_plus:
        raise DomainError("mollified data need w- < w+")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ramp = np.zeros_like(xa)
    pos = xa > 0.0
    ramp[pos] = gammainc(rp.q + 1.0, rp.eps * xa[pos])
    return _shaped(w_minus + (w_plus - w_minus) * ramp, x)


def _data_slope(rp: RarefactionParams, jump: float, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0.0
    s = rp.eps * x[pos]
    out[pos] = jump * rp.eps * np.exp(rp.q * np.log(s) - s - gammaln(rp.q + 1.0))
    return out


def _data_curvature(rp: RarefactionParams, jump: float, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0.0
    s = rp.eps * x[pos]
    out[pos] = (
        jump
        * rp.eps**2
        * np.exp((rp.q - 1.0) * np.log(s) - s - gammaln(rp.q + 1.0))
        * (rp.q - s)
    )
    return out


def burgers_evaluate(
    rp: RarefactionParams,
    w_minus: float,
    w_plus: float,
    x,
    t_burgers: float,
    rtol: float = 1e-12,
    max_iter: int = 200,
):
    """Solve Burgers' equation from the mollified data by characteristics.

    Returns (w, dw/dx, d2w/dx2) at the requested points.  The foot of the
    characteristic through each point is the unique root of
    x0 + w0(x0) * t = x (unique because the data are nondecreasing), found
    by bisection-safeguarded Newton iteration.
    """
    if t_burgers < 0.0:
        raise DomainError("Burgers evaluation needs t >= 0")
    if not w_minus < w_plus:
        raise DomainError("Burgers data need w- < w+")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    jump = w_plus - w_minus
    tb = float(t_burgers)

    def value(x0):
        out = np.full_like(x0, w_minus)
        pos = x0 > 0.0
        out[pos] = w_minus + jump * gammainc(rp.q + 1.0, rp.eps * x0[pos])
        return out

    foot = xa - w_minus * tb
    active = foot > 0.0  # characteristics from the constant region need no solve
    if np.any(active) and tb > 0.0:
        xt = xa[active]
        lo = np.maximum(xt - w_plus * tb, 0.0)
        hi = xt - w_minus * tb
        x0 = 0.5 * (lo + hi)
        scale = 1.0 + np.abs(xt)
        for _ in range(max_iter):
            g = x0 + value(x0) * tb - xt
            done = np.abs(g) <= rtol * scale
            if np.all(done):
                break
            hi = np.where(g > 0.0, x0, hi)
            lo = np.where(g > 0.0, lo, x0)
            step = g / (1.0 + _data_slope(rp, jump, x0) * tb)
            cand = x0 - step
            # accept Newton only when it stays inside the bracket and moves
            # less than half its width, otherwise bisect; plain in-bracket
            # acceptance can cycle between the flat and steep data regions
            take = (cand > lo) & (cand < hi) & (np.abs(step) <= 0.5 * (hi - lo))
            x0 = np.where(done, x0, np.where(take, cand, 0.5 * (lo + hi)))
        else:
            raise ConvergenceError(
                "characteristic foot iteration failed to converge; monotone "
                "data should make this impossible"
            )
        foot[active] = x0

    w = value(foot)
    d1 = _data_slope(rp, jump, foot)
    d2 = _data_curvature(rp, jump, foot)
    denom = 1.0 + d1 * tb
    w_x = d1 / denom
    w_xx = d2 / denom**3
    return _shaped(w, x), _shaped(w_x, x), _shaped(w_xx, x)


# ---------------------------------------------------------------------------
# Smooth approximate rarefaction and the exact fan
# ---------------------------------------------------------------------------


def rarefaction_state(p: GasParameters, tp: TransonicPoint, ff: FarField, w):
    """Map a characteristic value w = u + C(rho) to the gas state on the
    2-rarefaction curve through the far field.

    The curve is parametrized by constancy of the 2-Riemann invariant:
    C = (gamma-1)*(w - z+) / (gamma+1), u = w - C.
    """
    w_minus = tp.u_star + sound_speed(p, tp.rho_star)
    w_plus = ff.u_plus + sound_speed(p, ff.rho_plus)
    wa = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(wa < w_minus - 1e-10) or np.any(wa > w_plus + 1e-10):
        raise DomainError(
            f"characteristic value outside [{w_minus:g}, {w_plus:g}]"
        )
    wa = np.clip(wa, min(w_minus, w_plus), max(w_minus, w_plus))
    z_plus = riemann_invariant_2(p, ff.rho_plus, ff.u_plus)
    c = (p.gamma - 1.0) * (wa - z_plus) / (p.gamma + 1.0)
    rho = density_from_sound_speed(p, c)
    u = wa - c
    return _shaped(rho, w), _shaped(u, w)


def exact_rarefaction_state(p: GasParameters, tp: TransonicPoint, ff: FarField, xi):
    """Self-similar exact fan sampled at xi = x/t.

    Constant at the corner state left of the fan and at the far field
    beyond it; the convergence target of the time-asymptotic metrics.
    """
    w_minus = tp.u_star + sound_speed(p, tp.rho_star)
    w_plus = ff.u_plus + sound_speed(p, ff.rho_plus)
    w = np.clip(np.asarray(xi, dtype=float), min(w_minus, w_plus), max(w_minus, w_plus))
    return rarefaction_state(p, tp, ff, _shaped(w, xi))


@dataclass(frozen=True)
class FanValues:
    """Smooth-rarefaction fields at the requested points."""

    w: np.ndarray
    w_x: np.ndarray
    w_xx: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    rho_x: np.ndarray
    u_x: np.ndarray
    rho_xx: np.ndarray
    u_xx: np.ndarray
    u_xt: np.ndarray  # mixed derivative, used by the energy budget


@dataclass(frozen=True)
class SmoothRarefaction:
    """Smooth approximate 2-rarefaction on the half line.

    Wraps the Burgers solution of the mollified data; physical time t maps
    internally to Burgers time 1 + t, so callers always pass t >= 0.
    By construction the wall value stays pinned at the sonic corner state.
    """

    gas: GasParameters
    tp: TransonicPoint
    ff: FarField
    rp: RarefactionParams

    @property
    def w_minus(self) -> float:
        return self.tp.u_star + sound_speed(self.gas, self.tp.rho_star)

    @property
    def w_plus(self) -> float:
        return self.ff.u_plus + sound_speed(self.gas, self.ff.rho_plus)

    @property
    def z_plus(self) -> float:
        return riemann_invariant_2(self.gas, self.ff.rho_plus, self.ff.u_plus)

    @property
    def delta_bar(self) -> float:
        return self.w_plus - self.w_minus

    @property
    def degenerate(self) -> bool:
        return self.delta_bar <= 1e-13

    def w_bar(self, x, t: float):
        """Burgers characteristic value and x-derivatives at physical time t."""
        if self.degenerate:
            xa = np.atleast_1d(np.asarray(x, dtype=float))
            z = np.zeros_like(xa)
            return (
                _shaped(np.full_like(xa, self.w_minus), x),
                _shaped(z, x),
                _shaped(z.copy(), x),
            )
        return burgers_evaluate(self.rp, self.w_minus, self.w_plus, x, 1.0 + t)

    def evaluate(self, x, t: float) -> FanValues:
        if self.degenerate:
            xa = np.atleast_1d(np.asarray(x, dtype=float))
            z = np.zeros_like(xa)
            fields = {
                "w": np.full_like(xa, self.w_minus),
                "rho": np.full_like(xa, self.tp.rho_star),
                "u": np.full_like(xa, self.tp.u_star),
            }
            for name in ("w_x", "w_xx", "rho_x", "u_x", "rho_xx", "u_xx", "u_xt"):
                fields[name] = z.copy()
            return FanValues(**{k: _shaped(v, x) for k, v in fields.items()})
        w, w_x, w_xx = (np.atleast_1d(np.asarray(a, dtype=float)) for a in self.w_bar(x, t))
        g = self.gas.gamma
        c = (g - 1.0) * (w - self.z_plus) / (g + 1.0)
        rho = density_from_sound_speed(self.gas, c)
        u = w - c
        u_x = 2.0 / (g + 1.0) * w_x
        u_xx = 2.0 / (g + 1.0) * w_xx
        rho_over_c = rho / c
        rho_x = rho_over_c * u_x
        rho_xx = (
            2.0 * rho_over_c / (g + 1.0)
            * (w_xx + (3.0 - g) / (g + 1.0) * w_x**2 / c)
        )
        # d/dt of the slope via the Burgers equation: w_t = -w*w_x.
        w_xt = -(w_x**2 + w * w_xx)
        u_xt = 2.0 / (g + 1.0) * w_xt
        fields = {
            "w": w, "w_x": w_x, "w_xx": w_xx, "rho": rho, "u": u,
            "rho_x": rho_x, "u_x": u_x, "rho_xx": rho_xx, "u_xx": u_xx,
            "u_xt": u_xt,
        }
        return FanValues(**{k: _shaped(v, x) for k, v in fields.items()})


# ---------------------------------------------------------------------------
# Composite wave
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositeValues:
    rho: np.ndarray
    u: np.ndarray
    rho_x: np.ndarray
    u_x: np.ndarray
    rho_xx: np.ndarray
    u_xx: np.ndarray


@dataclass(frozen=True)
class CompositeWave:
    """Superposition of the boundary layer and the smooth rarefaction,
    shifted by the shared corner state.

    Satisfies the single-fluid equations up to the residual sources
    returned by :meth:`sources`, takes the wall values (rho_b, u_b) at
    x = 0 and approaches the far field as x -> infinity.
    """

    gas: GasParameters
    tp: TransonicPoint
    ff: FarField
    bd: BoundaryData
    bl: BoundaryLayerProfile
    fan: SmoothRarefaction
    strengths: WaveStrengths

    @property
    def u_b(self) -> float:
        return self.bd.u_b

    def evaluate(self, x, t: float) -> CompositeValues:
        b = self.bl.evaluate(x)
        f = self.fan.evaluate(x, t)
        # associate the fan deviation first so a degenerate fan leaves the
        # layer values untouched to the last bit
        return CompositeValues(
            rho=b.rho + (f.rho - self.tp.rho_star),
            u=b.u + (f.u - self.tp.u_star),
            rho_x=b.rho_x + f.rho_x,
            u_x=b.u_x + f.u_x,
            rho_xx=b.rho_xx + f.rho_xx,
            u_xx=b.u_xx + f.u_xx,
        )

    def sources(self, x, t: float):
        """Residual (mass, momentum) sources the composite leaves behind.

        Every term carries the deviation of one constituent from the
        corner state, so both vanish when either wave is degenerate
        (except for the fan's viscous remainder in the momentum source).
        """
        p, tp = self.gas, self.tp
        b = self.bl.evaluate(x)
        f = self.fan.evaluate(x, t)
        fan_du = f.u - tp.u_star
        fan_drho = f.rho - tp.rho_star
        bl_du = b.u - tp.u_star
        bl_drho = b.rho - tp.rho_star
        rho_hat = b.rho + fan_drho

        f_hat = b.rho_x * fan_du + b.u_x * fan_drho + f.rho_x * bl_du + f.u_x * bl_drho
        pp_hat = d_pressure(p, rho_hat)
        g_hat = (
            -f.u_xx
            + b.u * b.u_x * fan_drho
            + rho_hat * (b.u_x * fan_du + f.u_x * bl_du)
            + b.rho_x * (pp_hat - d_pressure(p, b.rho))
            + f.rho_x * (pp_hat - d_pressure(p, f.rho))
            - d_pressure(p, f.rho) / f.rho * f.rho_x * bl_drho
        )
        return _shaped(f_hat, x), _shaped(g_hat, x)

    def source_gradient(self, x, t: float):
        """x-derivative of the mass residual, for the source-norm checks."""
        b = self.bl.evaluate(x)
        f = self.fan.evaluate(x, t)
        tp = self.tp
        fx = (
            b.rho_xx * (f.u - tp.u_star)
            + b.u_xx * (f.rho - tp.rho_star)
            + f.rho_xx * (b.u - tp.u_star)
            + f.u_xx * (b.rho - tp.rho_star)
            + 2.0 * (b.rho_x * f.u_x + f.rho_x * b.u_x)
        )
        return _shaped(fx, x)


def build_composite(
    p: GasParameters,
    ff: FarField,
    bd: BoundaryData,
    rp: RarefactionParams | None = None,
    x_max: float | None = None,
    tol: float = 1e-12,
) -> CompositeWave:
    """Classify the data and assemble the composite wave.

    Accepts the layer+fan patterns and their degenerate limits (pure fan
    when u_b coincides with the corner velocity, pure layer when the far
    field is the corner state); anything else raises.
    """
    rp = rp or RarefactionParams()
    cls = classify(p, ff, bd)
    tp = cls.transonic
    if tp is None:
        raise ClassificationError(
            f"cannot build a composite wave for this configuration: {cls.reason}"
        )
    if bd.u_b > tp.u_star and abs(bd.u_b - tp.u_star) > DEGENERATE_TOL:
        raise ClassificationError(
            "boundary velocity sits on the fan side of the corner state; the "
            "composite wave needs u_b <= u*"
        )
    bl = solve_boundary_layer(p, tp, bd, x_max=x_max, tol=tol)
    fan = SmoothRarefaction(gas=p, tp=tp, ff=ff, rp=rp)
    return CompositeWave(
        gas=p, tp=tp, ff=ff, bd=bd, bl=bl, fan=fan,
        strengths=wave_strengths(tp, ff, bd, p),
    )


@dataclass(frozen=True)
class ConstantBackground:
    """Spatially constant quasineutral state with the composite interface.

    Any constant state with matching boundary data solves the system
    exactly, which makes this the reference object for the conservation
    and symmetry sanity runs.
    """

    rho0: float
    u0: float

    @property
    def u_b(self) -> float:
        return self.u0

    def evaluate(self, x, t: float) -> CompositeValues:
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        z = np.zeros_like(xa)
        vals = CompositeValues(
            rho=np.full_like(xa, self.rho0),
            u=np.full_like(xa, self.u0),
            rho_x=z,
            u_x=z.copy(),
            rho_xx=z.copy(),
            u_xx=z.copy(),
        )
        return CompositeValues(
            **{k: _shaped(getattr(vals, k), x)
               for k in ("rho", "u", "rho_x", "u_x", "rho_xx", "u_xx")}
        )

    def sources(self, x, t: float):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        z = np.zeros_like(xa)
        return _shaped(z, x), _shaped(z.copy(), x)
