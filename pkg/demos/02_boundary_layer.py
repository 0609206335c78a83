"""The boundary-layer equation of a funnel neck.

    Y'' + c Y / (1 + xi^2)^2 = 0,   c = 1/4

has no first-derivative term, so the Wronskian of any two solutions is
constant. Far from the neck every solution is a straight line
``Y ~ slope * xi + intercept``. The solution with ``Y(0) = 0, Y'(0) = 2``
grows; tuning ``Y(0)`` for a given ``Y'(0)`` makes the slope vanish.
"""

from __future__ import annotations

import math

import numpy as np

from narrow_escape.boundary_layer import bleq_bounded_ic, solve_bleq

grow = solve_bleq(0.0, 2.0)
print(f"Y(0)=0, Y'(0)=2: slope {grow.slope:.6f}, intercept {grow.intercept:.6f}")

s = solve_bleq(-4.7, -1.0)
print(f"Y(0)=-4.7, Y'(0)=-1: intercept {s.intercept:.6f}, residual slope {s.slope:.2e}")
print(f"  Wronskian with the growing solution {s.wronskian:.10f}, relative drift {s.wronskian_drift:.1e}")

# The slope is linear in the initial data, so the bounded member of the
# family is found from two solves.
y0, yinf = bleq_bounded_ic(-1.0)
print(f"bounded solution with Y'(0)=-1 starts at Y(0)={y0:.6f} and levels off at {yinf:.6f}")

# Closed form check: with phi = arctan(xi), Y / sqrt(1+xi^2) is a harmonic
# oscillator in phi with frequency sqrt(1+c).
w = math.sqrt(1.25)
phi = np.arctan(s.grid)
exact = np.sqrt(1 + s.grid**2) * (-4.7 * np.cos(w * phi) - 1.0 / w * np.sin(w * phi))
print(f"max deviation from the closed form: {np.max(np.abs(s.Y - exact) / (1 + np.abs(exact))):.1e}")
