#!/usr/bin/env python3
# Reproduce the decay laws behind the construction at desk scale: the
# layer's algebraic tail exponents, the fan's gradient decay (with its
# crossover), and the strength scaling of the layer integrals.
#
# Usage: python demos/03_decay_rates.py

import numpy as np

from nsp_outflow import BoundaryData, FarField, GasParameters, build_composite
from nsp_outflow.diagnostics import bl_integral_delta_exponent, decay_fit

gas = GasParameters()
cw = build_composite(gas, FarField(1.0, 0.2), BoundaryData(-0.8))
delta = cw.bl.delta_tilde

# Layer tail: fitted log-log slopes of |u - u*| and du/dx.
xs = np.geomspace(1e2 / delta, 1e4 / delta, 40)
vals = cw.bl.evaluate(xs)
s0 = np.polyfit(np.log(xs), np.log(np.abs(vals.u - cw.tp.u_star)), 1)[0]
s1 = np.polyfit(np.log(xs), np.log(vals.u_x), 1)[0]
print(f"layer tail exponents: value {s0:.3f} (expect -1), slope {s1:.3f} (expect -2)")

# Fan gradient decay: the asymptotic -1 rate only emerges once the fan has
# overtaken the mollifier ramp (t >> 1/(eps * max data slope) ~ 70 here).
fan = cw.fan
for window in ((10.0, 1e3), (1e3, 1e5)):
    times = np.geomspace(*window, 12)
    sups = []
    for t in times:
        x = np.linspace(0.0, fan.w_plus * (1 + t) + 800.0 / fan.rp.eps, 9000)
        sups.append(fan.evaluate(x, float(t)).u_x.max())
    fit = decay_fit(times, sups)
    print(f"fan sup-slope exponent over t in [{window[0]:g}, {window[1]:g}]: "
          f"{fit.exponent:.3f}")

# Strength scaling of the layer integral: linear only for small strengths.
for deltas in ((0.1, 0.2, 0.4), (0.0125, 0.025, 0.05)):
    exponent, values = bl_integral_delta_exponent(gas, cw.tp, k=0, j=2, deltas=deltas)
    pretty = {d: f"{v:.4g}" for d, v in values.items()}
    print(f"layer integral strength exponent over {deltas}: {exponent:.3f}  {pretty}")
