"""Boundary-layer ODE, projected surface dynamics and the exact surface MFPT.

``solve_bleq`` integrates ``Y'' + c/(1+xi^2)^2 Y = 0``; with ``c = 1/4`` this
is the boundary-layer equation of the funnel neck.

For a surface of revolution with generating curve ``r(x)`` the axial
coordinate of a Brownian particle obeys ``dz = a(z) dt + b(z) dw`` and the
MFPT from the pole is a double integral of the profile (see
:func:`surface_mfpt_quadrature`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .geometry.profiles import arc_density, profile_area
from .geometry.specs import GeometryError, RevolutionProfile

BLEQ_COEFF = 0.25
_REF_IC = (0.0, 2.0)


@dataclass(frozen=True)
class BleqSolution:
    """Samples of one solution plus its Wronskian with a reference solution.

    The reference solution has ``Y(0) = 0, Y'(0) = 2``; when the requested
    solution is closer to that one than to ``Y(0) = 1, Y'(0) = 0``, the
    latter is used so the Wronskian stays well away from zero.
    ``intercept`` is the limit of ``Y - xi Y'`` and ``slope`` the limit of
    ``Y'``; ``asymptote`` is whichever describes the solution (see ``growing``).
    """

    grid: np.ndarray
    Y: np.ndarray
    dY: np.ndarray
    wronskian: float
    wronskian_drift: float
    intercept: float
    slope: float
    growing: bool
    coeff_scale: float
    ref_ic: tuple

    @property
    def asymptote(self) -> float:
        return self.slope if self.growing else self.intercept

    def to_text(self, path=None) -> str:
        """Two-column ``xi Y`` text; written to ``path`` when given."""
        lines = ["# xi Y"] + [f"{x:.12e} {y:.12e}" for x, y in zip(self.grid, self.Y)]
        txt = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(txt)
        return txt


def _bleq_rhs(c):
    def rhs(xi, s):
        k = c / (1.0 + xi * xi) ** 2
        return [s[1], -k * s[0], s[3], -k * s[2]]

    return rhs


def _bleq_grid(xi_max, n=600):
    lin = np.linspace(0.0, min(10.0, xi_max), 201)
    if xi_max <= 10.0:
        return lin
    tail = np.geomspace(10.0, xi_max, n)
    g = np.union1d(lin, tail)
    return np.union1d(g, [0.5 * xi_max])


def solve_bleq(y0: float, dy0: float, xi_max: float = 1e4, coeff_scale: float = BLEQ_COEFF,
               rtol: float = 1e-12, atol: float = 1e-14, growth_ratio: float = 0.1) -> BleqSolution:
    """Integrate the boundary-layer equation from ``xi = 0`` to ``xi_max``.

    The intercept and slope are Richardson-extrapolated from ``xi_max/2``
    and ``xi_max`` (both converge like ``xi^-2``). A solution is ``growing``
    when ``|slope| > growth_ratio * |intercept|``.
    """
    if xi_max < 100:
        raise ValueError("xi_max must be at least 100")
    if not coeff_scale > 0:
        raise ValueError("coeff_scale must be positive")
    if y0 == 0 and dy0 == 0:
        raise ValueError("trivial initial data")
    ref = _REF_IC if 2 * abs(y0) >= abs(dy0) else (1.0, 0.0)
    grid = _bleq_grid(xi_max)
    sol = integrate.solve_ivp(_bleq_rhs(coeff_scale), (0.0, xi_max), [y0, dy0, ref[0], ref[1]],
                              method="DOP853", t_eval=grid, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise RuntimeError(f"boundary-layer integration failed: {sol.message}")
    Y, dY, R, dR = sol.y
    W = R * dY - dR * Y
    w0 = ref[0] * dy0 - ref[1] * y0
    drift = float(np.max(np.abs(W - w0)) / abs(w0))
    i1 = int(np.searchsorted(grid, 0.5 * xi_max))
    i2 = grid.size - 1
    icp = Y - grid * dY

    def rich(v):
        return (4 * v[i2] - v[i1]) / 3

    intercept, slope = rich(icp), rich(dY)
    growing = abs(slope) > growth_ratio * abs(intercept)
    return BleqSolution(grid, Y, dY, float(w0), drift, float(intercept), float(slope), bool(growing),
                        coeff_scale, ref)


def bleq_bounded_ic(dy0: float = -1.0, xi_max: float = 1e4, coeff_scale: float = BLEQ_COEFF):
    """Initial value ``Y(0)`` making the solution with ``Y'(0) = dy0`` bounded.

    The limiting slope is linear in the initial data, so two solves fix it.
    Returns ``(Y(0), Y(infinity))``.
    """
    s_a = solve_bleq(1.0, 0.0, xi_max, coeff_scale).slope
    s_b = solve_bleq(0.0, 1.0, xi_max, coeff_scale).slope
    y0 = -s_b * dy0 / s_a
    return y0, solve_bleq(y0, dy0, xi_max, coeff_scale).intercept


# ---------------------------------------------------------------------------
# projected dynamics on a surface of revolution


@dataclass(frozen=True)
class DriftField:
    """Drift ``a``, noise ``b`` and potential ``A = -int_Lambda^z a`` on a grid."""

    z: np.ndarray
    a_of_z: np.ndarray
    b_of_z: np.ndarray
    A_of_z: np.ndarray
    Lambda: float
    D: float

    def __post_init__(self):
        if np.any(self.b_of_z <= 0):
            raise GeometryError("noise intensity must be positive")

    def a(self, z):
        return np.interp(z, self.z, self.a_of_z)

    def b(self, z):
        return np.interp(z, self.z, self.b_of_z)


def _drift_terms(p: RevolutionProfile, x):
    r = np.asarray(p.r(x), dtype=float)
    r1 = np.asarray(p.dr(x), dtype=float)
    r2 = np.asarray(p.d2r(x), dtype=float)
    g = 1.0 + r1 * r1
    t1 = r1 / (r * g)
    t2 = r1 * r2 / (g * g)
    return t1 - t2, g


def drift_field(p: RevolutionProfile, D: float = 1.0, n_samples: int = 4097,
                length_scale: float = 1.0) -> DriftField:
    """Sample ``a(z)`` and ``b(z)`` of the axial SDE for the profile ``p``.

    Coordinates are ``length_scale`` times the profile coordinates, so the
    coefficients carry ``D / length_scale**2``. The last sample sits just
    below the pole, where ``b`` vanishes.
    """
    if n_samples < 3:
        raise ValueError("need at least 3 samples")
    z = np.linspace(p.Lambda, 0.0, n_samples)
    z[-1] = -1e-9 * abs(p.Lambda)
    r = np.asarray(p.r(z), dtype=float)
    if np.any(r <= 0):
        raise GeometryError("profile radius vanishes inside the interval")
    bracket, g = _drift_terms(p, z)
    k = D / length_scale**2
    a = k * bracket
    b = np.sqrt(2 * k / g)
    # the pole sample: b is already tiny, the drift limit is finite
    if not np.isfinite(a[-1]):
        a[-1] = 2 * a[-2] - a[-3]
    A = -integrate.cumulative_trapezoid(a, z, initial=0.0)
    return DriftField(z, a, b, A, p.Lambda, D)


def _kinks(p: RevolutionProfile, lo: float, hi: float):
    pts = list(p.joins)
    w = math.sqrt(p.a * p.ell)
    base = p.Lambda + p.cyl_len
    pts += [base + k * w for k in (0.5, 1, 2, 4, 8, 16)]
    return sorted(x for x in pts if lo < x < hi)


class _AreaTable:
    """``S(t)`` from cumulative panel integrals plus one short adaptive piece.

    Panels cluster at the neck and at the pole, where the arc density
    varies fastest.
    """

    def __init__(self, p: RevolutionProfile, n_panels: int = 256):
        self.p = p
        u = np.linspace(0.0, 1.0, n_panels + 1)
        nodes = p.Lambda * (1 - u * u * (3 - 2 * u))
        nodes[0], nodes[-1] = p.Lambda, 0.0
        nodes = np.union1d(nodes, [x for x in p.joins if p.Lambda < x < 0])
        pieces = [_area_between(p, lo, hi) for lo, hi in zip(nodes[:-1], nodes[1:])]
        # tail[i] = area between nodes[i] and the pole
        tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        self.nodes, self.tail = nodes, tail
        self.total = float(tail[0])

    def __call__(self, t: float) -> float:
        i = int(np.searchsorted(self.nodes, t, side="right"))
        i = min(max(i, 1), self.nodes.size - 1)
        return float(self.tail[i]) + _area_short(self.p, t, float(self.nodes[i]))


_GL = {n: np.polynomial.legendre.leggauss(n) for n in (10, 20)}


def _area_short(p, lo, hi):
    """Area of a short piece: two Gauss-Legendre orders, adaptive if they disagree."""
    if hi <= lo:
        return 0.0
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    est = []
    for n in (10, 20):
        x, w = _GL[n]
        est.append(half * float(w @ arc_density(p, mid + half * x)))
    if abs(est[1] - est[0]) <= 1e-14 + 1e-10 * abs(est[1]):
        return 2 * math.pi * est[1]
    return _area_between(p, lo, hi)


def _uprime_integrand(p: RevolutionProfile):
    S = _AreaTable(p)

    def f(t):
        r = float(p.r(t))
        if r <= 0:
            return 0.0
        # sqrt(1+r'^2)/r written through the pole-safe arc density
        return float(arc_density(p, t)) / (r * r) * S(t)

    return f


def _area_between(p, lo, hi):
    if hi <= lo:
        return 0.0
    pts = _kinks(p, lo, hi)
    v, _ = integrate.quad(lambda s: float(arc_density(p, s)), lo, hi, epsabs=1e-13, epsrel=1e-12,
                          limit=200, points=pts or None)
    return 2 * math.pi * v


def surface_mfpt_quadrature(p: RevolutionProfile, D: float = 1.0, length_scale: float = 1.0,
                            tol: float = 1e-10) -> float:
    """MFPT from the pole to the absorbing circle, ``u(0)``, by nested quadrature.

    ``u(0) = length_scale^2/(2 pi D) int_Lambda^0 sqrt(1+r'^2)/r S(t) dt``
    with ``S(t)`` the area between ``t`` and the pole. The integrand has a
    removable singularity at the pole and needs no special treatment.
    """
    if not p.a > 0:
        raise GeometryError("absorbing radius must be positive")
    f = _uprime_integrand(p)
    pts = _kinks(p, p.Lambda, 0.0)
    val, err = integrate.quad(f, p.Lambda, 0.0, epsabs=tol, epsrel=1e-10, limit=500, points=pts or None)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise RuntimeError(f"quadrature did not converge (estimate {val}, error {err})")
    return length_scale**2 / (2 * math.pi * D) * val


def surface_mfpt_profile(p: RevolutionProfile, z, D: float = 1.0, length_scale: float = 1.0):
    """``u(z)`` and ``u'(z)`` at the points ``z`` (sorted or not)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    f = _uprime_integrand(p)
    k = length_scale**2 / (2 * math.pi * D)
    up = np.array([k * f(t) for t in z])
    u = np.empty_like(z)
    for i, t in enumerate(z):
        pts = _kinks(p, p.Lambda, t)
        u[i] = k * integrate.quad(f, p.Lambda, t, epsabs=1e-12, epsrel=1e-11, limit=400, points=pts or None)[0]
    return u, up
