"""Generating curves of solids and surfaces of revolution.

Every profile lives on ``[Lambda, 0]``: the absorbing circle of radius ``a``
is at ``x = Lambda`` and the head closes at the pole ``x = 0``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .specs import GeometryError, RevolutionProfile


def _piecewise(x, cut, left, right):
    x = np.asarray(x, dtype=float)
    out = np.where(x < cut, left(np.minimum(x, cut)), right(np.maximum(x, cut)))
    return out[()] if out.ndim == 0 else out


def _cap(rho, xc):
    """Head sphere of radius ``rho`` centred on the axis at ``xc``."""

    def r(x):
        return np.sqrt(np.maximum(rho**2 - (x - xc) ** 2, 0.0))

    def dr(x):
        return -(x - xc) / np.maximum(r(x), 1e-300)

    def d2r(x):
        return -(rho**2) / np.maximum(r(x), 1e-300) ** 3

    return r, dr, d2r


def tangent_circle_profile(a: float, R: float, head_radius: float) -> RevolutionProfile:
    """Neck formed by a circle of radius ``R`` tangent to a spherical head.

    The funnel wall is the arc of the circle centred at ``(Lambda, a + R)``;
    it meets the head sphere (radius ``head_radius``) tangentially. Near
    the neck ``r - a ~ s^2 / (2R)``, i.e. ``nu = 1`` and ``ell = R``.
    """
    for name, v in (("a", a), ("R", R), ("head_radius", head_radius)):
        if not v > 0:
            raise GeometryError(f"{name} must be positive")
    rho = head_radius
    if a + R >= R + rho:
        raise GeometryError("head_radius must exceed the neck radius a")
    span = math.sqrt((R + rho) ** 2 - (a + R) ** 2)
    xc = -rho
    Lam = xc - span
    xt = Lam + R * span / (R + rho)

    def rf(x):
        return a + R - np.sqrt(np.maximum(R**2 - (x - Lam) ** 2, 0.0))

    def drf(x):
        return (x - Lam) / np.sqrt(R**2 - (x - Lam) ** 2)

    def d2rf(x):
        return R**2 / (R**2 - (x - Lam) ** 2) ** 1.5

    rh, drh, d2rh = _cap(rho, xc)
    return RevolutionProfile(
        r_of_x=lambda x: _piecewise(x, xt, rf, rh),
        Lambda=Lam,
        a=a,
        ell=R,
        nu=1.0,
        dr_of_x=lambda x: _piecewise(x, xt, drf, drh),
        d2r_of_x=lambda x: _piecewise(x, xt, d2rf, d2rh),
        name="tangent_circle",
        joins=(xt,),
    )


def power_funnel_profile(a: float, ell: float, nu: float, join_slope: float = 1.0) -> RevolutionProfile:
    """``r = a + s^(1+nu) / (nu (1+nu) ell^nu)`` joined smoothly to a spherical head.

    The power law is followed until its slope reaches ``join_slope``; from
    there the head is the sphere whose normal line passes through the
    join point, so ``r`` and ``r'`` are continuous.
    """
    if not (a > 0 and ell > 0 and nu > 0 and join_slope > 0):
        raise GeometryError("a, ell, nu and join_slope must be positive")
    c = 1.0 / (nu * (1 + nu) * ell**nu)
    sj = (join_slope * nu * ell**nu) ** (1.0 / nu)
    fj = a + c * sj ** (1 + nu)
    rho = fj * math.sqrt(1 + join_slope**2)
    off = fj * join_slope
    Lam = -(sj + off + rho)
    xj = Lam + sj
    xc = xj + off

    def rf(x):
        s = np.maximum(x - Lam, 0.0)
        return a + c * s ** (1 + nu)

    def drf(x):
        s = np.maximum(x - Lam, 0.0)
        return s**nu / (nu * ell**nu)

    def d2rf(x):
        s = np.maximum(x - Lam, 1e-300)
        return s ** (nu - 1) / ell**nu

    rh, drh, d2rh = _cap(rho, xc)
    return RevolutionProfile(
        r_of_x=lambda x: _piecewise(x, xj, rf, rh),
        Lambda=Lam,
        a=a,
        ell=ell,
        nu=nu,
        dr_of_x=lambda x: _piecewise(x, xj, drf, drh),
        d2r_of_x=lambda x: _piecewise(x, xj, d2rf, d2rh),
        name=f"power_funnel_nu{nu:g}",
        joins=(xj,),
    )


def sphere_profile(R: float, delta: float) -> RevolutionProfile:
    """Sphere of radius ``R`` with an absorbing polar cap of half-angle ``delta``.

    The cap is centred on the south pole, the pole ``x = 0`` is the north
    pole; the absorbing circle has radius ``R sin(delta)``.
    """
    if not R > 0 or not 0 < delta < math.pi:
        raise GeometryError("need R > 0 and 0 < delta < pi")
    r, dr, d2r = _cap(R, -R)
    return RevolutionProfile(
        r_of_x=r,
        Lambda=-R - R * math.cos(delta),
        a=R * math.sin(delta),
        ell=R,
        nu=0.0,
        dr_of_x=dr,
        d2r_of_x=d2r,
        name="sphere",
    )


def cylinder_profile(a: float, length: float) -> RevolutionProfile:
    """Straight tube ``r = a`` on ``[-length, 0]`` (no pole; used for checks)."""
    if not (a > 0 and length > 0):
        raise GeometryError("a and length must be positive")
    return RevolutionProfile(
        r_of_x=lambda x: np.full_like(np.asarray(x, dtype=float), a)[()],
        Lambda=-length,
        a=a,
        nu=0.0,
        cyl_len=0.0,
        dr_of_x=lambda x: np.zeros_like(np.asarray(x, dtype=float))[()],
        d2r_of_x=lambda x: np.zeros_like(np.asarray(x, dtype=float))[()],
        name="cylinder",
    )


def cone_profile(a: float, slope: float, length: float) -> RevolutionProfile:
    """Conical funnel ``r = a + C (x - Lambda)`` on ``[-length, 0]`` (no pole)."""
    if not (a > 0 and slope > 0 and length > 0):
        raise GeometryError("a, slope and length must be positive")
    Lam = -length
    return RevolutionProfile(
        r_of_x=lambda x: a + slope * (np.asarray(x, dtype=float) - Lam),
        Lambda=Lam,
        a=a,
        nu=0.0,
        cone_slope=slope,
        dr_of_x=lambda x: np.full_like(np.asarray(x, dtype=float), slope)[()],
        d2r_of_x=lambda x: np.zeros_like(np.asarray(x, dtype=float))[()],
        name="cone",
    )


def sampled_profile(x, r, ell: float = 1.0, nu: float = 1.0, name: str = "sampled") -> RevolutionProfile:
    """Profile from samples ``(x_i, r_i)`` with ``x_0 = Lambda`` and ``x_-1 = 0``.

    Interpolated by a cubic spline; the pole value may be zero.
    """
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    if x.ndim != 1 or x.shape != r.shape or x.size < 4:
        raise GeometryError("need matching 1-D sample arrays with at least 4 points")
    if np.any(np.diff(x) <= 0) or x[-1] != 0.0:
        raise GeometryError("samples must be increasing and end at x = 0")
    if np.any(r[:-1] <= 0):
        raise GeometryError("non-positive radius sample")
    cs = CubicSpline(x, r)
    d1, d2 = cs.derivative(1), cs.derivative(2)
    return RevolutionProfile(
        r_of_x=lambda t: cs(t)[()],
        Lambda=float(x[0]),
        a=float(r[0]),
        ell=ell,
        nu=nu,
        dr_of_x=lambda t: d1(t)[()],
        d2r_of_x=lambda t: d2(t)[()],
        name=name,
    )


def with_cylinder(p: RevolutionProfile, length: float) -> RevolutionProfile:
    """Attach a tube of radius ``p.a`` and the given length below the absorbing end."""
    if length < 0:
        raise GeometryError("cylinder length must be non-negative")
    if length == 0:
        return p
    Lam = p.Lambda

    def lift(f, tube):
        return lambda x: _piecewise(x, Lam, tube, f)

    const = lambda x: np.full_like(np.asarray(x, dtype=float), p.a)  # noqa: E731
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return RevolutionProfile(
        r_of_x=lift(p.r, const),
        Lambda=Lam - length,
        a=p.a,
        ell=p.ell,
        nu=p.nu,
        cyl_len=p.cyl_len + length,
        cone_slope=p.cone_slope,
        dr_of_x=lift(p.dr, zero),
        d2r_of_x=lift(p.d2r, zero),
        name=p.name + "+cylinder",
        joins=(Lam,) + tuple(p.joins),
    )


def arc_density(p: RevolutionProfile, x):
    """``r sqrt(1 + r'^2)``: finite at the pole even though ``r'`` blows up."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(p.r(x), dtype=float)
    dr = np.asarray(p.dr(x), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(np.abs(dr) > 1e8, r * np.abs(dr), r * np.sqrt(1 + dr**2))
    return out[()] if out.ndim == 0 else out


def profile_area(p: RevolutionProfile, t: float, tol: float = 1e-10) -> float:
    """Lateral area ``2 pi int_t^0 r sqrt(1 + r'^2) ds`` of the part right of ``t``."""
    if not p.Lambda - 1e-12 <= t <= 0:
        raise GeometryError(f"t={t} outside [Lambda, 0]")
    if t >= 0:
        return 0.0
    pts = [b for b in p.joins if t < b < 0]
    val, _ = integrate.quad(lambda s: float(arc_density(p, s)), t, 0.0, epsabs=tol, epsrel=1e-12,
                            limit=400, points=pts or None)
    if not math.isfinite(val):
        raise GeometryError("profile area integral did not converge")
    return 2 * math.pi * val


def profile_volume(p: RevolutionProfile, dim: int = 3) -> float:
    """Volume of the solid (``dim=3``) or area of the planar region ``|y| < r(x)`` (``dim=2``)."""
    pts = [b for b in p.joins if p.Lambda < b < 0] or None
    if dim == 3:
        f, k = (lambda s: float(p.r(s)) ** 2), math.pi
    elif dim == 2:
        f, k = (lambda s: float(p.r(s))), 2.0
    else:
        raise GeometryError("dim must be 2 or 3")
    val, _ = integrate.quad(f, p.Lambda, 0.0, epsabs=1e-12, epsrel=1e-12, limit=400, points=pts)
    return k * val
