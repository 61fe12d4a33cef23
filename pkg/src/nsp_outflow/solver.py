"""Finite-difference solver for the coupled two-fluid system on a
truncated half line.

One step advances continuity with a first-order upwind mass flux, then the
velocity with upwinded convection, a central pressure gradient, the
electric source, and backward-Euler viscosity (one tridiagonal solve per
fluid), so the time step is limited by convection only.  The electric
field is the right-anchored antiderivative of the charge imbalance.

Boundaries: the wall velocity is imposed exactly, the wall density is
extrapolated linearly (outflow leaves no physical condition for it), and
the right edge takes time-dependent values from the background wave.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConfigError, DomainError, PositivityError
from .gas import GasParameters, d_pressure, sound_speed
from .norms import h1_norm

SCHEMES = ("upwind1", "muscl2")
TERM_SETS = ("full", "viscous")
PERTURBATION_SHAPES = ("sin2", "multimode")


@dataclass(frozen=True)
class Grid:
    """Uniform node grid x_k = k*h on [0, L]."""

    L: float
    N: int

    def __post_init__(self) -> None:
        if not self.L > 0.0:
            raise ConfigError(f"domain length must be positive, got L={self.L}")
        if self.N < 16:
            raise ConfigError(f"need at least 16 cells, got N={self.N}")

    @property
    def h(self) -> float:
        return self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.N + 1)


@dataclass
class FluidState:
    """Both fluids on a common grid at one time level."""

    rho_i: np.ndarray
    u_i: np.ndarray
    rho_e: np.ndarray
    u_e: np.ndarray
    t: float

    def copy(self) -> "FluidState":
        return FluidState(
            self.rho_i.copy(), self.u_i.copy(), self.rho_e.copy(), self.u_e.copy(), self.t
        )

    def fields(self):
        return (self.rho_i, self.u_i, self.rho_e, self.u_e)


@dataclass
class FieldState:
    """Electric field with the far-end gauge E(L) = 0."""

    E: np.ndarray

    @property
    def boundary_trace(self) -> float:
        return float(self.E[0])


@dataclass(frozen=True)
class PerturbationSpec:
    """Compactly supported smooth bump added to selected initial fields.

    ``amplitude`` is the bump height unless ``h1_target`` is set, in which
    case the bump is rescaled so the combined discrete H1 norm of the
    perturbation equals that target.
    """

    amplitude: float = 0.0
    center: float = 5.0
    width: float = 10.0
    shape: str = "sin2"
    fields: tuple[str, ...] = ("rho_i", "u_i")
    seed: int = 0
    h1_target: float | None = None

    def __post_init__(self) -> None:
        if self.amplitude < 0.0:
            raise ConfigError("perturbation amplitude must be nonnegative")
        if self.width <= 0.0 or self.center < 0.0:
            raise ConfigError("perturbation bump needs width > 0 and center >= 0")
        if self.shape not in PERTURBATION_SHAPES:
            raise ConfigError(f"unknown perturbation shape {self.shape!r}")
        bad = set(self.fields) - {"rho_i", "u_i", "rho_e", "u_e"}
        if bad:
            raise ConfigError(f"unknown perturbation fields {sorted(bad)}")


@dataclass(frozen=True)
class SimConfig:
    """Solver knobs for one run."""

    cfl: float = 0.5
    t_final: float = 10.0
    snapshot_dt: float = 1.0
    scheme: str = "upwind1"
    terms: str = "full"
    field_refresh: int = 1
    max_steps: int | None = None
    perturbation: PerturbationSpec | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"Courant number must lie in (0, 1], got {self.cfl}")
        if self.t_final < 0.0:
            raise ConfigError("t_final must be nonnegative")
        if self.snapshot_dt <= 0.0:
            raise ConfigError("snapshot cadence must be positive")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; options: {SCHEMES}")
        if self.terms not in TERM_SETS:
            raise ConfigError(f"unknown term set {self.terms!r}; options: {TERM_SETS}")
        if self.field_refresh < 1:
            raise ConfigError("field refresh cadence must be >= 1")


def poisson_field(rho_i: np.ndarray, rho_e: np.ndarray, grid: Grid) -> FieldState:
    """Electric field E(x) = -integral over [x, L] of (rho_i - rho_e).

    Right-to-left trapezoid accumulation anchored at E(L) = 0; linear in
    the charge imbalance by construction.
    """
    n = grid.N + 1
    if rho_i.shape != (n,) or rho_e.shape != (n,):
        raise DomainError(
            f"states must live on the grid ({n} nodes), got {rho_i.shape} and {rho_e.shape}"
        )
    imbalance = rho_i - rho_e
    segments = 0.5 * grid.h * (imbalance[:-1] + imbalance[1:])
    E = np.zeros(n)
    E[:-1] = -np.cumsum(segments[::-1])[::-1]
    return FieldState(E=E)


def cfl_dt(state: FluidState, grid: Grid, config: SimConfig, gas: GasParameters) -> float:
    """Convective time-step limit; viscosity is implicit and does not enter."""
    speed = max(
        float(np.max(np.abs(state.u_i) + sound_speed(gas, state.rho_i))),
        float(np.max(np.abs(state.u_e) + sound_speed(gas, state.rho_e))),
    )
    if not np.isfinite(speed) or speed <= 0.0:
        raise DomainError(f"non-finite wave speeds (max |u|+C = {speed})")
    return config.cfl * grid.h / speed


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _mass_flux(rho: np.ndarray, u: np.ndarray, scheme: str) -> np.ndarray:
    """Upwind mass flux at the faces between consecutive nodes."""
    u_face = 0.5 * (u[:-1] + u[1:])
    if scheme == "muscl2":
        slope = np.zeros_like(rho)
        slope[1:-1] = _minmod(rho[1:-1] - rho[:-2], rho[2:] - rho[1:-1])
        left = rho[:-1] + 0.5 * slope[:-1]
        right = rho[1:] - 0.5 * slope[1:]
    else:
        left = rho[:-1]
        right = rho[1:]
    return np.where(u_face >= 0.0, left * u_face, right * u_face)


def _upwind_slope(u: np.ndarray, h: float) -> np.ndarray:
    """One-sided derivative of u against the local flow direction (interior)."""
    d = np.zeros_like(u)
    d[1:-1] = np.where(
        u[1:-1] >= 0.0, (u[1:-1] - u[:-2]) / h, (u[2:] - u[1:-1]) / h
    )
    return d


def _implicit_viscosity(u_rhs: np.ndarray, rho: np.ndarray, dt: float, h: float,
                        left_value: float, right_value: float) -> np.ndarray:
    """Solve (I - dt/rho * d2/dx2) u = rhs with Dirichlet end values."""
    n = u_rhs.size
    a = dt / (rho * h * h)
    ab = np.zeros((3, n))
    ab[0, 2:] = -a[1:-1]  # superdiagonal
    ab[1, :] = 1.0
    ab[1, 1:-1] += 2.0 * a[1:-1]
    ab[2, :-2] = -a[1:-1]  # subdiagonal
    rhs = u_rhs.copy()
    rhs[0] = left_value
    rhs[-1] = right_value
    out = solve_banded((1, 1), ab, rhs)
    # the banded LU may leave roundoff on the Dirichlet rows; the boundary
    # contract is exact equality
    out[0] = left_value
    out[-1] = right_value
    return out


def step(
    state: FluidState,
    grid: Grid,
    gas: GasParameters,
    config: SimConfig,
    background,
    dt: float | None = None,
    field: FieldState | None = None,
    forcing=None,
):
    """Advance one time level; returns (new state, field used).

    ``background`` supplies the wall velocity and the right-edge values; it
    is any object with ``u_b`` and ``evaluate(x, t)``.  ``forcing``, when
    given, is called as forcing(x, t) and must return per-node source
    arrays (mass_i, momentum_i, mass_e, momentum_e); momentum forcing is
    per unit mass.  Density positivity is enforced after the update.
    """
    h = grid.h
    if dt is None:
        dt = cfl_dt(state, grid, config, gas)
    if field is None:
        field = poisson_field(state.rho_i, state.rho_e, grid)
    t_new = state.t + dt

    if forcing is not None:
        f_rho_i, f_u_i, f_rho_e, f_u_e = forcing(grid.x, state.t)
    else:
        f_rho_i = f_u_i = f_rho_e = f_u_e = 0.0

    edge = background.evaluate(grid.L, t_new)
    u_b = background.u_b

    new = state.copy()
    new.t = t_new
    viscous_only = config.terms == "viscous"

    for sign, rho, u, f_rho, f_u, rho_attr, u_attr in (
        (+1.0, state.rho_i, state.u_i, f_rho_i, f_u_i, "rho_i", "u_i"),
        (-1.0, state.rho_e, state.u_e, f_rho_e, f_u_e, "rho_e", "u_e"),
    ):
        if viscous_only:
            rho_new = rho.copy()
        else:
            flux = _mass_flux(rho, u, config.scheme)
            rho_new = rho.copy()
            rho_new[1:-1] -= dt / h * (flux[1:] - flux[:-1])
            if forcing is not None:
                rho_new[1:-1] += dt * np.asarray(f_rho)[1:-1]
            rho_new[0] = 2.0 * rho_new[1] - rho_new[2]
            rho_new[-1] = edge.rho

        if np.any(rho_new <= 0.0) or not np.all(np.isfinite(rho_new)):
            raise PositivityError(
                f"density of fluid {rho_attr!r} lost positivity at t={t_new:.6g}",
                snapshot=state,
            )

        if viscous_only:
            explicit = u + dt * np.asarray(f_u) if forcing is not None else u.copy()
        else:
            conv = u * _upwind_slope(u, h)
            grad_rho = np.zeros_like(rho_new)
            grad_rho[1:-1] = (rho_new[2:] - rho_new[:-2]) / (2.0 * h)
            pressure_term = d_pressure(gas, rho_new) * grad_rho / rho_new
            explicit = u + dt * (-conv - pressure_term + sign * field.E)
            if forcing is not None:
                explicit += dt * np.asarray(f_u)

        u_new = _implicit_viscosity(explicit, rho_new, dt, h, u_b, edge.u)
        setattr(new, rho_attr, rho_new)
        setattr(new, u_attr, u_new)

    return new, field


def _bump(spec: PerturbationSpec, x: np.ndarray) -> np.ndarray:
    s = (x - spec.center) / spec.width
    inside = (s > 0.0) & (s < 1.0)
    out = np.zeros_like(x)
    window = np.sin(np.pi * s[inside]) ** 2
    if spec.shape == "sin2":
        out[inside] = spec.amplitude * window
    else:  # multimode
        rng = np.random.default_rng(spec.seed)
        coeff = rng.uniform(-1.0, 1.0, size=4)
        modes = sum(
            c * np.cos((j + 1) * np.pi * s[inside]) for j, c in enumerate(coeff)
        )
        out[inside] = spec.amplitude * window * modes
    return out


def initial_data(background, spec: PerturbationSpec | None, grid: Grid,
                 gas: GasParameters):
    """Background wave at t = 0 plus the requested perturbation.

    Returns (state, h1) where h1 is the combined discrete H1 norm of the
    perturbation over the selected fields.  The bump vanishes with its
    derivative at the wall and beyond its support, so the wall velocity
    compatibility is preserved exactly.
    """
    base = background.evaluate(grid.x, 0.0)
    state = FluidState(
        rho_i=np.array(base.rho, dtype=float),
        u_i=np.array(base.u, dtype=float),
        rho_e=np.array(base.rho, dtype=float),
        u_e=np.array(base.u, dtype=float),
        t=0.0,
    )
    state.u_i[0] = background.u_b
    state.u_e[0] = background.u_b

    if spec is None or spec.amplitude == 0.0:
        return state, 0.0

    if spec.center + spec.width > grid.L:
        raise ConfigError("perturbation support must lie inside the domain")
    bump = _bump(spec, grid.x)
    if bump[0] != 0.0:
        raise ConfigError("perturbation must vanish at the wall (compatibility)")

    single = h1_norm(bump, grid.h)
    total = single * np.sqrt(len(spec.fields))
    if spec.h1_target is not None and total > 0.0:
        bump = bump * (spec.h1_target / total)
        total = spec.h1_target
    for name in spec.fields:
        arr = getattr(state, name)
        arr += bump
    return state, float(total)


def charge_dipole(state: FluidState, grid: Grid) -> float:
    """Integral of (rho_i - rho_e) over the domain; equals -E(0)."""
    return float(np.trapezoid(state.rho_i - state.rho_e, dx=grid.h))
