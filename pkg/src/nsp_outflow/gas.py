"""Polytropic gas closure shared by every other module.

Pressure law P(rho) = A * rho**gamma with unit viscosity, the local sound
speed, the 2-family Riemann invariant, and the relative-entropy density
used by the energy diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Densities below this are rejected rather than clamped so that vacuum
# pathologies surface loudly instead of producing quiet garbage.
DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class GasParameters:
    """Coefficients of the pressure law P(rho) = A * rho**gamma.

    ``mu`` is the common viscosity of both fluids.  The whole construction
    assumes unit viscosity, so values other than 1 are rejected.
    """

    A: float = 1.0 / 3.0
    gamma: float = 3.0
    mu: float = 1.0

    def __post_init__(self) -> None:
        if not self.A > 0.0:
            raise DomainError(f"pressure coefficient must be positive, got A={self.A}")
        if not self.gamma > 1.0:
            raise DomainError(f"adiabatic exponent must exceed 1, got gamma={self.gamma}")
        if self.mu != 1.0:
            raise DomainError("viscosity is fixed to 1 in code units")


def _checked_density(rho, name: str = "density"):
    arr = np.asarray(rho, dtype=float)
    if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= DENSITY_FLOOR):
        raise DomainError(f"{name} must be positive and finite (floor {DENSITY_FLOOR:g})")
    return arr


def _like(out: np.ndarray, template):
    """Return a float for scalar input, the array otherwise."""
    if np.ndim(template) == 0:
        return float(out)
    return out


def pressure(p: GasParameters, rho):
    """Pressure P(rho) = A * rho**gamma; strictly increasing in rho."""
    arr = _checked_density(rho)
    return _like(p.A * arr**p.gamma, rho)


def d_pressure(p: GasParameters, rho):
    """P'(rho) = gamma * A * rho**(gamma-1), the squared sound speed."""
    arr = _checked_density(rho)
    return _like(p.gamma * p.A * arr ** (p.gamma - 1.0), rho)


def sound_speed(p: GasParameters, rho):
    """Local sound speed C(rho) = sqrt(gamma*A) * rho**((gamma-1)/2)."""
    arr = _checked_density(rho)
    return _like(np.sqrt(p.gamma * p.A) * arr ** ((p.gamma - 1.0) / 2.0), rho)


def riemann_invariant_2(p: GasParameters, rho, u):
    """Invariant z = u - 2*C(rho)/(gamma-1) of the 2-wave family.

    Two states connected by a 2-rarefaction curve share this value.
    """
    arr = _checked_density(rho)
    c = np.sqrt(p.gamma * p.A) * arr ** ((p.gamma - 1.0) / 2.0)
    return _like(np.asarray(u, dtype=float) - 2.0 * c / (p.gamma - 1.0), rho)


def density_from_sound_speed(p: GasParameters, c):
    """Invert C(rho): rho = (c**2 / (gamma*A)) ** (1/(gamma-1))."""
    carr = np.asarray(c, dtype=float)
    if np.any(carr <= 0.0):
        raise DomainError("sound speed must be positive")
    return _like((carr**2 / (p.gamma * p.A)) ** (1.0 / (p.gamma - 1.0)), c)


def phi_potential(p: GasParameters, rho, rho_hat):
    """Relative-entropy density Phi(rho, rho_hat).

    Integral of (P(s) - P(rho_hat)) / s**2 over s from rho_hat to rho,
    evaluated in closed form.  Nonnegative, zero exactly at rho == rho_hat,
    and convex in rho; it is the density part of the modified energy.
    """
    r = _checked_density(rho)
    rh = _checked_density(rho_hat, name="reference density")
    g = p.gamma
    value = p.A * (r ** (g - 1.0) - rh ** (g - 1.0)) / (g - 1.0) + p.A * rh**g * (
        1.0 / r - 1.0 / rh
    )
    return _like(value, rho if np.ndim(rho) else rho_hat)
