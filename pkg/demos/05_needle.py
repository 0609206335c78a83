"""A Brownian needle turning around in a narrow strip.

A needle of length ``l`` can only flip when it passes through the vertical,
which is a narrow window once ``l`` is close to the strip width ``l0``. The
turnaround time grows like ``(l0 - l)^(-1/2)``, so quartering the gap
halves the time.
"""

from __future__ import annotations

from narrow_escape import asymptotics as asy
from narrow_escape.geometry import NeedleStripSpec
from narrow_escape.mc import SimParams, simulate_needle

sim = SimParams(dt=1e-4, n_paths=500, seed=5, refine_factor=16)
means = {}
for gap in (0.01, 0.04):
    spec = NeedleStripSpec(1.0, 1.0 - gap)
    pred = asy.needle_turnaround(spec)
    est = simulate_needle(spec, (0.0, 0.0), sim)
    means[gap] = est.mean
    print(f"gap {gap}: predicted {pred.tau:.2f}, simulated {est.mean:.2f} +/- {est.stderr:.2f}, "
          f"ratio {est.mean / pred.tau:.2f}")
print(f"time ratio for a 4x wider gap: {means[0.01] / means[0.04]:.2f} (leading order: 2)")
