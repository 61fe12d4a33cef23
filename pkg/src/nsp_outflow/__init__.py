"""Composite boundary-layer/rarefaction waves for the two-fluid
Navier-Stokes-Poisson outflow problem on the half line, plus a coupled
solver and the diagnostics that verify the construction's decay rates."""

from .errors import (
    ClassificationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    PositivityError,
)
from .gas import GasParameters, phi_potential, pressure, riemann_invariant_2, sound_speed
from .phase_plane import (
    BoundaryData,
    Case,
    Classification,
    FarField,
    TransonicPoint,
    WaveStrengths,
    boundary_density,
    classify,
    transonic_point,
    transonic_point_bisection,
    wave_strengths,
)
from .profiles import (
    BoundaryLayerProfile,
    CompositeWave,
    ConstantBackground,
    RarefactionParams,
    SmoothRarefaction,
    build_composite,
    burgers_evaluate,
    exact_rarefaction_state,
    mollified_initial_data,
    rarefaction_state,
    solve_boundary_layer,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryData",
    "BoundaryLayerProfile",
    "Case",
    "Classification",
    "ClassificationError",
    "CompositeWave",
    "ConfigError",
    "ConstantBackground",
    "ConvergenceError",
    "DomainError",
    "FarField",
    "FitError",
    "GasParameters",
    "PositivityError",
    "RarefactionParams",
    "SmoothRarefaction",
    "TransonicPoint",
    "WaveStrengths",
    "boundary_density",
    "build_composite",
    "burgers_evaluate",
    "classify",
    "exact_rarefaction_state",
    "mollified_initial_data",
    "phi_potential",
    "pressure",
    "rarefaction_state",
    "riemann_invariant_2",
    "solve_boundary_layer",
    "sound_speed",
    "transonic_point",
    "transonic_point_bisection",
    "wave_strengths",
]
