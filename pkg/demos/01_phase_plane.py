#!/usr/bin/env python3
# Walk through the phase-plane machinery: classify outflow data, locate the
# sonic corner state two independent ways, and print the wave strengths.
#
# Usage: python demos/01_phase_plane.py

import numpy as np

from nsp_outflow import (
    BoundaryData,
    FarField,
    GasParameters,
    classify,
    transonic_point,
    transonic_point_bisection,
    wave_strengths,
)

gas = GasParameters()  # A = 1/3, gamma = 3: sound speed equals density
print(f"gas: A={gas.A:.4f} gamma={gas.gamma}")

# The canonical configuration: outgoing far field, strong outflow wall.
ff = FarField(rho_plus=1.0, u_plus=0.2)
bd = BoundaryData(u_b=-0.8)

tp = transonic_point(gas, ff)
tp_check = transonic_point_bisection(gas, ff)
print(f"\nsonic corner state (closed form):  rho*={tp.rho_star:.12f} u*={tp.u_star:.12f}")
print(f"sonic corner state (bisection):    rho*={tp_check.rho_star:.12f} "
      f"u*={tp_check.u_star:.12f}")
print(f"route disagreement: {abs(tp.v_star - tp_check.v_star):.2e}")

cls = classify(gas, ff, bd)
print(f"\nclassification: {cls.case.value}  ({cls.reason})")
print(f"wall density rho_b = {cls.rho_b:.6f}")

ws = wave_strengths(tp, ff, bd, gas)
print(f"strengths: layer {ws.delta_tilde:.3f}, fan {ws.delta_r:.3f}, "
      f"data jump {ws.delta_bar:.3f}")

# Sweep the wall velocity through both thresholds to see every pattern.
print("\nwall-velocity sweep:")
for u_b in (-0.05, -0.2, -0.39, -0.41, -0.8, -2.0):
    tag = classify(gas, ff, BoundaryData(u_b)).case.value
    print(f"  u_b = {u_b:+.2f} -> {tag}")

# Subsonic incoming far fields sort into the III family instead.
ff_sub = FarField(rho_plus=1.0, u_plus=-0.1)
for u_b in (-0.3, -0.8):
    tag = classify(gas, ff_sub, BoundaryData(u_b)).case.value
    print(f"  (u+ = -0.1) u_b = {u_b:+.2f} -> {tag}")
