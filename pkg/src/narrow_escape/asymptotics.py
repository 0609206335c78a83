"""Closed-form leading-order narrow escape times.

Every function returns a :class:`NetPrediction`. Inputs outside the
small-parameter regime (ratio above ``threshold``, default 0.1) still give a
value, flagged ``extrapolated``; inputs for which a formula has no meaning
raise :class:`RegimeError`.

Formula identifiers (stable strings, used in CSV output and on the CLI):

==========================  =====================================================
id                          law
==========================  =====================================================
net_2d_window               |Omega|/(pi D) ln(|dOmega|/(pi |dOmega_a|))
net_3d_window               |Omega|/(4 a D [1 + (L+N)/(2 pi) a ln a])
planar_funnel_general       sqrt(Rc (Rc+rc)/(2 rc eps)) pi |Omega|/(2D)
planar_funnel_symmetric     pi |Omega|/(2 D sqrt(eps/Rc))
planar_funnel_nu            pi |Omega|/(2 D sqrt(eps/ell)), nu > 1
planar_multi_neck           pi |Omega|/(2 D sum sqrt(eps_j/ell_j))
funnel_3d                   (ell/a)^{3/2} V/(sqrt2 ell D)
funnel_3d_multi_neck        V/(sqrt2 D sum ell_j (a_j/ell_j)^{3/2})
surface_funnel              (S/2D) (ell/((1+nu)a))^{nu/(1+nu)} nu^{1/(1+nu)}/sin(nu pi/(1+nu))
surface_funnel_nu1          S/(4 D sqrt(a/(2 ell)))
sphere_cap                  (2R^2/D) ln(sin(theta/2)/sin(delta/2))
surface_with_cylinder       surface_funnel + S L/(2 pi D a) + L^2/(2D)
cone                        head + (S sqrt(1+C^2)/(2 pi D C) + (1+C^2) L^2/(2D)) ln(C L/a)
cone_full                   exact cone integral (valid for any C L/a)
composite                   head + L^2/(2D) + |Omega_1| L/(|dOmega_a| D)
dumbbell                    two head-to-head escape rates and their sum
needle_turnaround           pi (pi/2 - 1) sqrt(DX/Dr)/(Dr sqrt(l0 (l0 - l)))
==========================  =====================================================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry.specs import CompositeSpec, DumbbellSpec, NeedleStripSpec, PlanarFunnelSpec

DEFAULT_THRESHOLD = 0.1


class RegimeError(ValueError):
    """Input for which the formula is meaningless (not merely extrapolated)."""


class UnsupportedCaseError(ValueError):
    """Geometry for which no closed form is available."""


class FormulaId(str, enum.Enum):
    NET_2D_WINDOW = "net_2d_window"
    NET_3D_WINDOW = "net_3d_window"
    PLANAR_FUNNEL_GENERAL = "planar_funnel_general"
    PLANAR_FUNNEL_SYMMETRIC = "planar_funnel_symmetric"
    PLANAR_FUNNEL_NU = "planar_funnel_nu"
    PLANAR_MULTI_NECK = "planar_multi_neck"
    FUNNEL_3D = "funnel_3d"
    FUNNEL_3D_MULTI_NECK = "funnel_3d_multi_neck"
    SURFACE_FUNNEL = "surface_funnel"
    SURFACE_FUNNEL_NU1 = "surface_funnel_nu1"
    SPHERE_CAP = "sphere_cap"
    SURFACE_WITH_CYLINDER = "surface_with_cylinder"
    CONE = "cone"
    CONE_FULL = "cone_full"
    COMPOSITE = "composite"
    DUMBBELL = "dumbbell"
    NEEDLE_TURNAROUND = "needle_turnaround"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NetPrediction:
    formula_id: FormulaId
    tau: float
    regime_note: str
    inputs_echo: dict = field(default_factory=dict)
    extrapolated: bool = False
    small_param: float = float("nan")
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise RegimeError(f"{self.formula_id}: non-physical tau={self.tau}")

    @property
    def rate(self) -> float:
        return 1.0 / self.tau


@dataclass(frozen=True)
class ExitProbabilities:
    probs: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")

    @classmethod
    def from_weights(cls, w) -> "ExitProbabilities":
        w = np.asarray(w, dtype=float)
        return cls(tuple(float(x) for x in w / w.sum()))

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]


def _pos(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{k} must be positive and finite, got {v!r}")


def _pred(fid, tau, note, small, threshold, echo, **extra):
    return NetPrediction(fid, float(tau), note, echo, bool(small > threshold), float(small), extra)


# -- classical small windows ------------------------------------------------


def net_2d_window(area, boundary_len, window_len, D=1.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    _pos(area=area, boundary_len=boundary_len, window_len=window_len, D=D)
    eps = math.pi * window_len / boundary_len
    if eps > 1:
        raise RegimeError("window longer than |dOmega|/pi: the logarithm turns negative")
    tau = area / (math.pi * D) * math.log(1.0 / eps) if eps < 1 else 0.0
    note = "O(1) geometry-dependent constant dropped; error O(|Omega|/D)"
    return _pred(FormulaId.NET_2D_WINDOW, tau, note, eps, threshold,
                 dict(area=area, boundary_len=boundary_len, window_len=window_len, D=D))


def net_3d_window(volume, a, D=1.0, L_curv=0.0, N_curv=0.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    _pos(volume=volume, a=a, D=D)
    bracket = 1 + (L_curv + N_curv) / (2 * math.pi) * a * math.log(a)
    if bracket <= 0:
        raise RegimeError("curvature correction makes the denominator non-positive")
    small = a / volume ** (1 / 3)
    return _pred(FormulaId.NET_3D_WINDOW, volume / (4 * a * D * bracket), "o(a ln a) dropped in the bracket",
                 small, threshold, dict(volume=volume, a=a, D=D, L_curv=L_curv, N_curv=N_curv))


# -- planar funnels -----------------------------------------------------------


def net_2d_funnel(spec: PlanarFunnelSpec, D=1.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    _pos(D=D)
    echo = dict(eps=spec.eps, Rc=spec.Rc, rc=spec.rc, nu_plus=spec.nu_plus, nu_minus=spec.nu_minus,
                ell_plus=spec.ell_plus, ell_minus=spec.ell_minus, area=spec.area, D=D)
    small = spec.eps / min(spec.boundary_len, spec.Rc, spec.rc)
    note = "leading order; relative error O(sqrt(eps))"
    if spec.nu_plus == 1 and spec.nu_minus == 1:
        if spec.Rc == spec.rc:
            tau = math.pi * spec.area / (2 * D * math.sqrt(spec.eps / spec.Rc))
            return _pred(FormulaId.PLANAR_FUNNEL_SYMMETRIC, tau, note, small, threshold, echo)
        tau = math.sqrt(spec.Rc * (spec.Rc + spec.rc) / (2 * spec.rc * spec.eps)) * math.pi * spec.area / (2 * D)
        return _pred(FormulaId.PLANAR_FUNNEL_GENERAL, tau, note, small, threshold, echo)
    if spec.nu_plus == spec.nu_minus and spec.nu_plus > 1 and spec.ell_plus == spec.ell_minus:
        tau = math.pi * spec.area / (2 * D * math.sqrt(spec.eps / spec.ell_plus))
        return _pred(FormulaId.PLANAR_FUNNEL_NU, tau, note, small, threshold, echo)
    raise UnsupportedCaseError("closed form exists only for nu+ = nu- = 1 or symmetric nu > 1 funnels")


def net_2d_multi_neck(necks: Sequence[tuple], area, D=1.0, threshold=DEFAULT_THRESHOLD):
    """``necks`` is a list of ``(eps_j, ell_j)``; returns (prediction, exit probabilities)."""
    necks = list(necks)
    if not necks:
        raise ValueError("empty neck list")
    _pos(area=area, D=D)
    for e, l in necks:
        _pos(eps=e, ell=l)
    w = np.array([math.sqrt(e / l) for e, l in necks])
    tau = math.pi * area / (2 * D * w.sum())
    small = max(e / l for e, l in necks)
    pred = _pred(FormulaId.PLANAR_MULTI_NECK, tau, "well-separated necks; leading order in each sqrt(eps_j)",
                 small, threshold, dict(necks=necks, area=area, D=D))
    return pred, ExitProbabilities.from_weights(w)


# -- funnels in space ---------------------------------------------------------


def net_3d_funnel(volume, ell, a, D=1.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    _pos(volume=volume, ell=ell, a=a, D=D)
    tau = (ell / a) ** 1.5 * volume / (math.sqrt(2) * ell * D)
    return _pred(FormulaId.FUNNEL_3D, tau, "leading order; relative error O(sqrt(a/ell))", a / ell, threshold,
                 dict(volume=volume, ell=ell, a=a, D=D))


def net_3d_multi_neck(necks: Sequence[tuple], volume, D=1.0, threshold=DEFAULT_THRESHOLD):
    """``necks`` is a list of ``(a_j, ell_j)``; returns (prediction, exit probabilities)."""
    necks = list(necks)
    if not necks:
        raise ValueError("empty neck list")
    _pos(volume=volume, D=D)
    for a, l in necks:
        _pos(a=a, ell=l)
    w = np.array([a**1.5 / math.sqrt(l) for a, l in necks])
    tau = volume / (math.sqrt(2) * D * w.sum())
    small = max(a / l for a, l in necks)
    pred = _pred(FormulaId.FUNNEL_3D_MULTI_NECK, tau, "well-separated necks; leading order in each a_j/ell_j",
                 small, threshold, dict(necks=necks, volume=volume, D=D))
    return pred, ExitProbabilities.from_weights(w)


# -- surfaces of revolution ----------------------------------------------------


def net_surface(S, a, ell, nu, D=1.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    if nu <= 0:
        raise ValueError("nu <= 0 has no funnel: use net_sphere_cap or net_cone")
    _pos(S=S, a=a, ell=ell, D=D)
    k = nu / (1 + nu)
    tau = S / (2 * D) * (ell / ((1 + nu) * a)) ** k * nu ** (1 / (1 + nu)) / math.sin(math.pi * k)
    return _pred(FormulaId.SURFACE_FUNNEL, tau, "leading order; O(S/D) dropped", a / ell, threshold,
                 dict(S=S, a=a, ell=ell, nu=nu, D=D))


def net_surface_nu1(S, a, ell, D=1.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    _pos(S=S, a=a, ell=ell, D=D)
    tau = S / (4 * D * math.sqrt(a / (2 * ell)))
    return _pred(FormulaId.SURFACE_FUNNEL_NU1, tau, "leading order; O(S/D) dropped", a / ell, threshold,
                 dict(S=S, a=a, ell=ell, D=D))


def net_sphere_cap(R, theta, delta, D=1.0) -> NetPrediction:
    """MFPT from polar angle ``theta`` to a cap of half-angle ``delta`` (exact)."""
    _pos(R=R, delta=delta, D=D)
    if not theta <= math.pi:
        raise ValueError("theta must not exceed pi")
    if theta < delta:
        raise RegimeError("start point lies inside the absorbing cap")
    tau = 2 * R**2 / D * math.log(math.sin(theta / 2) / math.sin(delta / 2))
    return NetPrediction(FormulaId.SPHERE_CAP, max(tau, 0.0), "exact for the sphere",
                         dict(R=R, theta=theta, delta=delta, D=D), False, delta,
                         dict(cap_circle_radius=R * math.sin(delta), half_chord=R * math.sin(delta / 2)))


def net_surface_with_cylinder(S, a, ell, nu, cyl_len, D=1.0, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    if cyl_len < 0:
        raise ValueError("cylinder length must be non-negative")
    base = net_surface(S, a, ell, nu, D, threshold)
    tau = base.tau + S * cyl_len / (2 * math.pi * D * a) + cyl_len**2 / (2 * D)
    return _pred(FormulaId.SURFACE_WITH_CYLINDER, tau, base.regime_note, base.small_param, threshold,
                 dict(S=S, a=a, ell=ell, nu=nu, cyl_len=cyl_len, D=D))


def net_cone(S, a, C, cone_len, D=1.0, head_integral=0.0, form="auto", threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    """Head joined to the absorbing circle by a cone of slope ``C``.

    ``form="simplified"`` keeps only the logarithmic terms (needs ``C L >> a``),
    ``form="full"`` evaluates the whole cone integral, which also covers
    ``C L <~ a`` and tends to the cylinder result as ``C -> 0``. ``"auto"``
    switches to the full form when ``C L <= a``.
    """
    _pos(S=S, a=a, C=C, cone_len=cone_len, D=D)
    x = C * cone_len / a
    if form == "auto":
        form = "simplified" if x > 1 else "full"
    echo = dict(S=S, a=a, C=C, cone_len=cone_len, D=D, head_integral=head_integral)
    g = 1 + C**2
    if form == "simplified":
        lg = math.log(x)
        tau = head_integral + (S * math.sqrt(g) / (2 * math.pi * D * C) + g * cone_len**2 / (2 * D)) * lg
        return _pred(FormulaId.CONE, tau, "O(1) dropped next to ln(C L/a)", 1 / x, threshold, echo)
    if form != "full":
        raise ValueError(f"unknown form {form!r}")
    lg = math.log1p(x)
    top = a + C * cone_len
    tube = g / (2 * D * C**2) * (top**2 * lg - 0.5 * (top**2 - a**2))
    tau = head_integral + S * math.sqrt(g) / (2 * math.pi * D * C) * lg + tube
    return NetPrediction(FormulaId.CONE_FULL, tau, "exact along the cone; head supplied separately", echo,
                         False, 1 / x)


# -- composite domains and rates ------------------------------------------------


def net_composite(head_tau, spec: CompositeSpec, D=1.0) -> NetPrediction:
    _pos(D=D)
    if head_tau < 0:
        raise ValueError("head_tau must be non-negative")
    L = spec.neck_len
    tau = head_tau + L**2 / (2 * D) + spec.head_volume * L / (spec.window_size * D)
    return NetPrediction(FormulaId.COMPOSITE, tau, "head time plus exact neck passage",
                         dict(head_tau=head_tau, head_volume=spec.head_volume, neck_radius=spec.neck_radius,
                              neck_len=L, dim=spec.dim, D=D))


def eigen_bottleneck(composite_tau: float) -> float:
    _pos(tau=composite_tau)
    return 1.0 / composite_tau


def eigen_multi(taus: Iterable[float]) -> float:
    taus = list(taus)
    if not taus:
        raise ValueError("empty list")
    return float(sum(eigen_bottleneck(t) for t in taus))


@dataclass(frozen=True)
class DumbbellRates:
    rate_12: float
    rate_21: float
    eigenvalue: float
    tau_12: float
    tau_21: float
    extrapolated: bool = False


def _half_dumbbell(vol, Rc, a, L, D):
    return math.sqrt(2) * (Rc / a) ** 1.5 * vol / (Rc * D) + L**2 / (4 * D) + vol * L / (math.pi * a**2 * D)


def dumbbell_rates(spec: DumbbellSpec, threshold=DEFAULT_THRESHOLD) -> DumbbellRates:
    t12 = _half_dumbbell(spec.omega1_vol, spec.Rc1, spec.a, spec.L, spec.D)
    t21 = _half_dumbbell(spec.omega3_vol, spec.Rc3, spec.a, spec.L, spec.D)
    return DumbbellRates(1 / t12, 1 / t21, 1 / t12 + 1 / t21, t12, t21, not spec.is_asymptotic_regime(threshold))


def needle_turnaround(spec: NeedleStripSpec, threshold=DEFAULT_THRESHOLD) -> NetPrediction:
    """Mean time for the needle to turn around (twice the time to reach the vertical)."""
    tau = math.pi * (math.pi / 2 - 1) / (spec.Dr * math.sqrt(spec.l0 * (spec.l0 - spec.l))) * math.sqrt(
        spec.DX / spec.Dr)
    return _pred(FormulaId.NEEDLE_TURNAROUND, tau, "leading order in sqrt(eps), eps = (l0 - l)/l0", spec.eps,
                 threshold, dict(l0=spec.l0, l=spec.l, DX=spec.DX, DY=spec.DY, Dr=spec.Dr),
                 one_way=tau / 2, renewal_factor=2)
