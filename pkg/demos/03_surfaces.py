"""Escape on surfaces of revolution.

On a surface generated by ``r(x)`` the axial coordinate of a Brownian
particle is itself a 1D diffusion with drift. Three routes to the mean exit
time from the pole are compared:

* the exact double-integral quadrature,
* a 1D Euler-Maruyama simulation of the projected motion,
* the leading-order law ``S / (4 D sqrt(a / 2 ell))`` for a funnel neck.

For the sphere the quadrature is exact, and the closed form
``2 R^2 / D ln(sin(theta/2) / sin(delta/2))`` is available.
"""

from __future__ import annotations

import math

from narrow_escape import asymptotics as asy
from narrow_escape.boundary_layer import drift_field, surface_mfpt_quadrature
from narrow_escape.geometry import profile_area, sphere_profile, tangent_circle_profile
from narrow_escape.mc import SimParams, simulate_surface_1d

delta = 0.1
exact = asy.net_sphere_cap(1.0, math.pi, delta).tau
quad = surface_mfpt_quadrature(sphere_profile(1.0, delta))
est = simulate_surface_1d(drift_field(sphere_profile(1.0, delta)), 0.0, SimParams(dt=1e-4, n_paths=1000, seed=3))
print(f"sphere, cap half-angle {delta}: closed form {exact:.5f}, quadrature {quad:.5f}, "
      f"1D simulation {est.mean:.3f} +/- {est.stderr:.3f}")

print("\ntangent-circle funnel on a unit head, ell = 1")
print(f"{'a':>6} {'quadrature':>11} {'asymptotic':>11} {'ratio':>7}")
for a in (0.04, 0.02, 0.01, 0.005):
    p = tangent_circle_profile(a, 1.0, 1.0)
    S = profile_area(p, p.Lambda)
    u0 = surface_mfpt_quadrature(p)
    law = asy.net_surface(S, a, 1.0, 1.0).tau
    print(f"{a:6.3f} {u0:11.4f} {law:11.4f} {u0 / law:7.4f}")

# A straight cylindrical neck adds a term linear in its length.
p = asy.net_surface_with_cylinder(1.0, 0.02, 1.0, 1.0, 1.0)
print(f"\nS=1, a=0.02 with a unit cylinder attached: {p.tau:.3f}")
