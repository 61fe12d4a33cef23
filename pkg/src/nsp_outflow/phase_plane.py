"""Phase-plane classification of far-field and boundary data.

Locates the transonic corner state on the 2-rarefaction curve through the
far field, sorts configurations into the supported wave patterns, and
computes the boundary density and the three wave strengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .errors import ClassificationError, DomainError
from .gas import GasParameters, density_from_sound_speed, sound_speed

#: Relative half-width of the tie band around sonic far fields: data with
#: | |u+| - C+ | below this resolve to the transonic branch.
SONIC_TIE_TOL = 1e-12


@dataclass(frozen=True)
class FarField:
    """State approached as x -> +infinity (shared by both fluids)."""

    rho_plus: float
    u_plus: float

    def __post_init__(self) -> None:
        if not self.rho_plus > 0.0:
            raise DomainError(f"far-field density must be positive, got {self.rho_plus}")

    @property
    def v_plus(self) -> float:
        return 1.0 / self.rho_plus


@dataclass(frozen=True)
class BoundaryData:
    """Velocity imposed on both fluids at the wall; outflow means u_b < 0."""

    u_b: float

    def __post_init__(self) -> None:
        if not self.u_b < 0.0:
            raise DomainError(f"outflow requires u_b < 0, got u_b={self.u_b}")


@dataclass(frozen=True)
class TransonicPoint:
    """Sonic state on the 2-rarefaction curve through the far field.

    The junction between boundary layer and rarefaction fan; satisfies
    u_star = -c_star and rho_star * v_star = 1.
    """

    v_star: float
    rho_star: float
    u_star: float
    c_star: float


class Case(Enum):
    """Wave-pattern taxonomy for the outflow problem."""

    I = "I"
    II = "II"
    III_1 = "III-1"
    III_2 = "III-2"
    IV_1 = "IV-1"
    IV_2 = "IV-2"
    UNSUPPORTED = "Unsupported"


#: Patterns whose asymptotic state this package can build and simulate
#: against (boundary layer + rarefaction superposition).
COMPOSITE_CASES = (Case.III_2, Case.IV_2)


@dataclass(frozen=True)
class Classification:
    """Outcome of the phase-plane decision tree."""

    case: Case
    transonic: TransonicPoint | None = None
    rho_b: float | None = None
    reason: str = ""


@dataclass(frozen=True)
class WaveStrengths:
    delta_tilde: float  # boundary layer
    delta_r: float  # rarefaction fan
    delta_bar: float  # underlying Burgers data jump


def transonic_point(p: GasParameters, ff: FarField) -> TransonicPoint:
    """Intersection of the 2-rarefaction curve through the far field with
    the sonic line u = -C(rho).

    Closed form: constancy of the 2-Riemann invariant along the curve gives
    c_star = (2*C+ - (gamma-1)*u+) / (gamma+1).
    """
    c_plus = sound_speed(p, ff.rho_plus)
    c_star = (2.0 * c_plus - (p.gamma - 1.0) * ff.u_plus) / (p.gamma + 1.0)
    if not c_star > 0.0:
        raise ClassificationError(
            "the 2-rarefaction curve through the far field does not reach the "
            f"sonic line (c_star={c_star:g} <= 0)"
        )
    rho_star = density_from_sound_speed(p, c_star)
    return TransonicPoint(
        v_star=1.0 / rho_star, rho_star=rho_star, u_star=-c_star, c_star=c_star
    )


def transonic_point_bisection(
    p: GasParameters,
    ff: FarField,
    rel_tol: float = 1e-12,
    quad_tol: float = 1e-13,
) -> TransonicPoint:
    """Independent route to the transonic point: bisection on the implicit
    equation u(v) = -C(1/v) along the 2-rarefaction curve, with the curve
    integral evaluated by adaptive quadrature.

    Deliberately avoids the closed form so the two routes cross-check
    each other.
    """
    g = p.gamma
    root_ga = np.sqrt(g * p.A)
    v_plus = ff.v_plus

    def residual(v: float) -> float:
        # curve integral of s**(-(g+1)/2) on [v+, v], evaluated on a log
        # axis where the integrand is a plain exponential; adaptive
        # quadrature on the raw axis breaks down over wide brackets
        integral, _ = quad(
            lambda tau: np.exp(-0.5 * (g - 1.0) * tau),
            np.log(v_plus), np.log(v),
            epsabs=quad_tol, epsrel=quad_tol, limit=200,
        )
        return ff.u_plus - root_ga * integral + root_ga * v ** (-(g - 1.0) / 2.0)

    lo, hi = min(v_plus, 1e-6), 1e6
    f_lo = residual(lo)
    # tighten the upper end by doubling before bisecting so the quadrature
    # never spans more decades than needed
    probe = max(2.0 * v_plus, 2.0 * lo)
    while probe < hi and residual(probe) > 0.0:
        probe *= 2.0
    hi = min(probe, hi)
    f_hi = residual(hi)
    if not (f_lo > 0.0 > f_hi):
        raise ClassificationError(
            "no sonic intersection on the 2-rarefaction curve inside the "
            f"bracket [{lo:g}, {hi:g}]"
        )
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    v_star = 0.5 * (lo + hi)
    rho_star = 1.0 / v_star
    c_star = sound_speed(p, rho_star)
    return TransonicPoint(v_star=v_star, rho_star=rho_star, u_star=-c_star, c_star=c_star)


def _rho_on_rarefaction_curve(p: GasParameters, ff: FarField, u: float) -> float:
    """Density on the 2-rarefaction curve through the far field at velocity u."""
    z_plus = ff.u_plus - 2.0 * sound_speed(p, ff.rho_plus) / (p.gamma - 1.0)
    c = (p.gamma - 1.0) * (u - z_plus) / 2.0
    if not c > 0.0:
        raise ClassificationError(f"velocity u={u:g} lies beyond the rarefaction curve")
    return density_from_sound_speed(p, c)


def classify(p: GasParameters, ff: FarField, bd: BoundaryData) -> Classification:
    """Sort (far field, boundary velocity) into the wave-pattern taxonomy.

    Only comparisons of u_b against 0, the transonic velocity and the
    far-field velocity enter, so the tag is stable under perturbations of
    u_b that cross no threshold.  Supersonic incoming far fields are
    reported as unsupported: telling the pure-boundary-layer pattern apart
    from shock-bearing ones would require the 2-shock curve intersection,
    which this package does not compute.
    """
    if not bd.u_b < 0.0:
        raise DomainError("classification requires outflow data u_b < 0")

    c_plus = sound_speed(p, ff.rho_plus)
    mach = abs(ff.u_plus) / c_plus

    if ff.u_plus > 0.0:
        tp = transonic_point(p, ff)
        return _subcase(p, ff, bd, tp, subsonic_family=False)

    if mach > 1.0 + SONIC_TIE_TOL:
        return Classification(
            Case.UNSUPPORTED,
            reason="supersonic incoming far field: requires the 2-shock curve "
            "intersection (shock patterns are out of scope)",
        )

    if mach >= 1.0 - SONIC_TIE_TOL:
        # Transonic far field: the sonic corner is the far field itself.
        if bd.u_b < ff.u_plus:
            tp = TransonicPoint(
                v_star=ff.v_plus,
                rho_star=ff.rho_plus,
                u_star=ff.u_plus,
                c_star=c_plus,
            )
            return Classification(
                Case.II,
                transonic=tp,
                rho_b=ff.rho_plus * ff.u_plus / bd.u_b,
                reason="degenerate boundary layer only; no fan",
            )
        return Classification(
            Case.UNSUPPORTED,
            reason="transonic far field with u_b >= u+: compressive data lead "
            "to shock patterns, which are out of scope",
        )

    # Subsonic far field with u+ <= 0.
    if bd.u_b >= ff.u_plus:
        return Classification(
            Case.UNSUPPORTED,
            reason="subsonic far field with u_b >= u+: compressive data lead "
            "to shock patterns, which are out of scope",
        )
    tp = transonic_point(p, ff)
    return _subcase(p, ff, bd, tp, subsonic_family=True)


def _subcase(
    p: GasParameters,
    ff: FarField,
    bd: BoundaryData,
    tp: TransonicPoint,
    subsonic_family: bool,
) -> Classification:
    """Split on u_b against the transonic velocity; ties go to the pure fan."""
    if tp.u_star <= bd.u_b:
        case = Case.III_1 if subsonic_family else Case.IV_1
        rho_b = _rho_on_rarefaction_curve(p, ff, bd.u_b)
        reason = "rarefaction fan only; boundary state sits on the fan curve"
    else:
        case = Case.III_2 if subsonic_family else Case.IV_2
        rho_b = boundary_density(tp, bd)
        reason = "degenerate boundary layer superposed with a rarefaction fan"
    return Classification(case, transonic=tp, rho_b=rho_b, reason=reason)


def boundary_density(tp: TransonicPoint, bd: BoundaryData) -> float:
    """Wall density of the boundary layer, rho_b = rho* u* / u_b.

    Constancy of the mass flux along the stationary layer fixes the wall
    value; requires u_b < u* < 0.
    """
    if not (bd.u_b < tp.u_star < 0.0):
        raise ClassificationError(
            f"not a boundary-layer configuration: need u_b < u* < 0, got "
            f"u_b={bd.u_b:g}, u*={tp.u_star:g}"
        )
    return tp.rho_star * tp.u_star / bd.u_b


def wave_strengths(
    tp: TransonicPoint, ff: FarField, bd: BoundaryData, p: GasParameters
) -> WaveStrengths:
    """Strengths of the layer, the fan, and the underlying Burgers data.

    The left Burgers datum u* + C(rho*) must vanish for a sonic corner;
    it is recomputed and checked here rather than assumed.
    """
    if bd.u_b - tp.u_star > 1e-14:
        raise ClassificationError(
            "wave strengths are defined for boundary-layer configurations "
            f"(u_b <= u*), got u_b={bd.u_b:g} > u*={tp.u_star:g}"
        )
    w_minus = tp.u_star + sound_speed(p, tp.rho_star)
    if abs(w_minus) > 1e-10:
        raise ClassificationError(
            f"corner state is not sonic: u* + C(rho*) = {w_minus:.3e}"
        )
    w_plus = ff.u_plus + sound_speed(p, ff.rho_plus)
    return WaveStrengths(
        delta_tilde=abs(tp.u_star - bd.u_b),
        delta_r=abs(ff.rho_plus - tp.rho_star) + abs(ff.u_plus - tp.u_star),
        delta_bar=w_plus - w_minus,
    )
