"""Immutable descriptors for the bottleneck geometries.

All lengths share one (arbitrary) unit; areas and volumes are in that unit
squared or cubed, diffusion coefficients in length^2/time and the
rotational coefficient of the needle in 1/time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Optional

import numpy as np


class GeometryError(ValueError):
    """Raised for descriptors that violate their invariants."""


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise GeometryError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class PlanarFunnelSpec:
    """Planar head with one funnel-shaped neck.

    ``eps`` is the width of the absorbing gap, ``Rc``/``rc`` the radii of the
    two osculating circles at the gap, ``nu_plus``/``nu_minus`` the funnel
    exponents and ``ell_plus``/``ell_minus`` their length scales (equal to the
    radii when the exponents are 1).
    """

    eps: float
    Rc: float
    rc: float
    nu_plus: float = 1.0
    nu_minus: float = 1.0
    ell_plus: Optional[float] = None
    ell_minus: Optional[float] = None
    area: float = math.pi
    boundary_len: float = 2 * math.pi

    def __post_init__(self):
        if self.ell_plus is None:
            object.__setattr__(self, "ell_plus", self.Rc)
        if self.ell_minus is None:
            object.__setattr__(self, "ell_minus", self.rc)
        for name in ("eps", "Rc", "rc", "ell_plus", "ell_minus", "area", "boundary_len"):
            _positive(name, getattr(self, name))
        if self.nu_plus <= 0 or self.nu_minus <= 0:
            raise GeometryError("funnel exponents must be positive")

    @property
    def symmetric(self) -> bool:
        return self.nu_plus == self.nu_minus and self.ell_plus == self.ell_minus

    def is_asymptotic_regime(self, ratio_threshold: float = 0.1) -> bool:
        return self.eps < ratio_threshold * min(self.boundary_len, self.Rc, self.rc)


@dataclass(frozen=True)
class RevolutionProfile:
    """Generating curve ``r(x)`` on ``[Lambda, 0]``.

    The absorbing end sits at ``x = Lambda`` where ``r = a``; the far end
    ``x = 0`` is a pole of the head where ``r`` vanishes like ``sqrt(|x|)``.
    ``dr`` and ``d2r`` are optional closed-form derivatives; central
    differences are used when they are missing. ``joins`` lists interior
    points where the curve changes analytic form (``r''`` may jump there).
    """

    r_of_x: Callable[[np.ndarray], np.ndarray]
    Lambda: float
    a: float
    ell: float = 1.0
    nu: float = 1.0
    cyl_len: float = 0.0
    cone_slope: Optional[float] = None
    dr_of_x: Optional[Callable] = field(default=None, repr=False, compare=False)
    d2r_of_x: Optional[Callable] = field(default=None, repr=False, compare=False)
    name: str = "profile"
    joins: tuple = ()

    def __post_init__(self):
        if not self.Lambda < 0:
            raise GeometryError("Lambda must be negative")
        _positive("a", self.a)
        _positive("ell", self.ell)
        if self.nu < 0:
            raise GeometryError("nu must be non-negative")
        if self.cyl_len < 0:
            raise GeometryError("cyl_len must be non-negative")
        if abs(float(self.r_of_x(self.Lambda)) - self.a) > 1e-9 * max(1.0, self.a):
            raise GeometryError("profile must satisfy r(Lambda) = a")
        xs = np.linspace(self.Lambda, 0.0, 257)[1:-1]
        if np.any(np.asarray(self.r_of_x(xs)) <= 0):
            raise GeometryError("profile radius must be positive on (Lambda, 0)")

    def r(self, x):
        return self.r_of_x(x)

    def dr(self, x):
        if self.dr_of_x is not None:
            return self.dr_of_x(x)
        h = 1e-6 * abs(self.Lambda)
        return (self.r_of_x(x + h) - self.r_of_x(x - h)) / (2 * h)

    def d2r(self, x):
        if self.d2r_of_x is not None:
            return self.d2r_of_x(x)
        h = 1e-4 * abs(self.Lambda)
        return (self.r_of_x(x + h) - 2 * self.r_of_x(x) + self.r_of_x(x - h)) / h**2

    def funnel_law(self, x):
        """The local power law of the funnel near the absorbing end."""
        s = np.asarray(x) - self.Lambda
        return self.a + s ** (1 + self.nu) / (self.nu * (1 + self.nu) * self.ell**self.nu)

    def check_funnel_law(self, rel_tol: float = 0.05, span: float = 0.05) -> bool:
        """Sample the first ``span`` of the funnel and compare with the power law.

        The comparison is on ``r - a`` so that the constant neck radius does
        not hide a wrong exponent.
        """
        if self.nu == 0:
            return True
        s = np.linspace(0.0, span * abs(self.Lambda), 41)[1:]
        got = np.asarray(self.r_of_x(self.Lambda + s)) - self.a
        want = self.funnel_law(self.Lambda + s) - self.a
        return bool(np.all(np.abs(got - want) <= rel_tol * want + 1e-14))


@dataclass(frozen=True)
class CompositeSpec:
    """A head joined through a funnel to a cylindrical neck of length ``neck_len``."""

    head_volume: float
    neck_radius: float
    neck_len: float
    head_funnel: object = None
    dim: int = 3

    def __post_init__(self):
        _positive("head_volume", self.head_volume)
        _positive("neck_radius", self.neck_radius)
        if self.neck_len < 0:
            raise GeometryError("neck_len must be non-negative")
        if self.dim not in (2, 3):
            raise GeometryError("dim must be 2 or 3")

    @property
    def window_size(self) -> float:
        """|dOmega_a|: the gap length in the plane, the disk area in space."""
        if self.dim == 2:
            return 2 * self.neck_radius
        return math.pi * self.neck_radius**2


@dataclass(frozen=True)
class DumbbellSpec:
    omega1_vol: float
    omega3_vol: float
    Rc1: float
    Rc3: float
    a: float
    L: float
    D: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            _positive(f.name, getattr(self, f.name))

    def is_asymptotic_regime(self, ratio_threshold: float = 0.1) -> bool:
        return self.a < ratio_threshold * min(self.Rc1, self.Rc3)


@dataclass(frozen=True)
class NeedleStripSpec:
    """Needle of length ``l`` in a strip of width ``l0``."""

    l0: float
    l: float
    DX: float = 1.0
    DY: float = 1.0
    Dr: float = 1.0

    def __post_init__(self):
        for name in ("l0", "l", "DY", "Dr"):
            _positive(name, getattr(self, name))
        if not self.l < self.l0:
            raise GeometryError("needle must be shorter than the strip width")
        if self.DX < self.DY:
            raise GeometryError("DX must not be smaller than DY")

    @property
    def eps(self) -> float:
        return (self.l0 - self.l) / self.l0

    def half_width(self, theta):
        return 0.5 * (self.l0 - self.l * np.sin(theta))

    def D_y(self, theta):
        return self.DX * np.sin(theta) ** 2 + self.DY * np.cos(theta) ** 2

    def neck_radius_of_curvature(self) -> float:
        """Radius of curvature at the neck after the isotropizing change of variables."""
        return 2 * self.DX / ((1 - self.eps) * self.l0**2 * self.Dr)


def nondimensionalize(spec: PlanarFunnelSpec) -> tuple[PlanarFunnelSpec, float]:
    """Scale lengths by ``ell_plus``; returns the scaled spec and the scale."""
    s = spec.ell_plus
    scaled = replace(
        spec,
        eps=spec.eps / s,
        Rc=spec.Rc / s,
        rc=spec.rc / s,
        ell_plus=spec.ell_plus / s,
        ell_minus=spec.ell_minus / s,
        area=spec.area / s**2,
        boundary_len=spec.boundary_len / s,
    )
    return scaled, s


def redimensionalize(spec: PlanarFunnelSpec, scale: float) -> PlanarFunnelSpec:
    return replace(
        spec,
        eps=spec.eps * scale,
        Rc=spec.Rc * scale,
        rc=spec.rc * scale,
        ell_plus=spec.ell_plus * scale,
        ell_minus=spec.ell_minus * scale,
        area=spec.area * scale**2,
        boundary_len=spec.boundary_len * scale,
    )


def needle_contains(theta: float, y: float, spec: NeedleStripSpec) -> bool:
    return bool(abs(y) < 0.5 * (spec.l0 - spec.l * math.sin(theta)))
