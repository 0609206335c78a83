from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narrow_escape.geometry import (
    BallDomain,
    FunnelDomain2D,
    GeometryError,
    Neck,
    NeedleDomain,
    NeedleStripSpec,
    PlanarFunnelSpec,
    ProfileDomain,
    concentric_image,
    contains,
    cylinder_profile,
    funnel_alpha,
    mobius_inverse,
    mobius_map,
    needle_contains,
    nondimensionalize,
    power_funnel_profile,
    profile_area,
    profile_volume,
    redimensionalize,
    reflect,
    sampled_profile,
    sphere_profile,
    tangent_circle_profile,
    with_cylinder,
)
from narrow_escape.geometry.domains import funnel2d_inside, profile_inside
from narrow_escape.mc import path_rng
from narrow_escape.mc.kernels import funnel2d_trajectory, profile_trajectory

# -- Möbius map ----------------------------------------------------------------


def test_mobius_identity_and_zero():
    assert mobius_map(0.5, 0.0) == pytest.approx(0.5)
    for a in (0.3, -0.8, 0.2 + 0.1j):
        assert abs(mobius_map(a, a)) == 0


def test_mobius_fixed_point_on_unit_circle():
    assert mobius_map(1.0, -0.8) == pytest.approx(1.0, abs=1e-15)


def test_mobius_pole():
    with pytest.raises(ZeroDivisionError):
        mobius_map(1 / 0.5, 0.5)


@given(st.floats(-0.99, 0.99), st.floats(-3, 3), st.floats(-3, 3))
def test_mobius_roundtrip(alpha, x, y):
    w = complex(x, y)
    if abs(1 + alpha * w) < 1e-6:
        return
    z = mobius_inverse(w, alpha)
    assert abs(mobius_map(z, alpha) - w) <= 1e-12 * max(1.0, abs(w))


# -- funnel_alpha --------------------------------------------------------------


def test_funnel_alpha_examples():
    assert funnel_alpha(1, 1, 0).leading == -1
    assert funnel_alpha(1, 1, 0).exact == pytest.approx(-1, abs=1e-15)
    fa = funnel_alpha(1, 1, 0.01)
    assert fa.leading == pytest.approx(-0.9)
    assert abs(fa.exact - fa.leading) < 0.01
    fa = funnel_alpha(1, 3, 0.02)
    assert fa.leading == pytest.approx(-1 + math.sqrt(0.03), rel=1e-12)
    assert fa.leading == pytest.approx(-0.8268, abs=1e-4)
    assert abs(fa.exact - fa.leading) < 0.02


@pytest.mark.parametrize("rc,eps", [(1.0, 0.01), (3.0, 0.02), (0.5, 0.1)])
def test_funnel_alpha_makes_circles_concentric(rc, eps):
    # independent check: the exact root sends both gap circles to circles about 0
    fa = funnel_alpha(1.0, rc, eps)
    c_out, r_out = concentric_image(0.0, 1.0, fa.exact)
    c_in, _ = concentric_image(-1 - eps - rc, rc, fa.exact)
    assert abs(c_out) < 1e-12 and r_out == pytest.approx(1.0, abs=1e-12)
    assert abs(c_in) < 1e-11


def test_funnel_alpha_monotone_and_inside():
    eps = np.linspace(1e-4, 0.25, 200)
    ex = np.array([funnel_alpha(1.0, 2.0, e).exact for e in eps])
    assert np.all(np.abs(ex) < 1)
    assert np.all(np.diff(ex) > 0)
    assert funnel_alpha(1.0, 2.0, 1e-10).exact == pytest.approx(-1, abs=1e-4)


# -- specs ---------------------------------------------------------------------


def test_planar_spec_validation():
    with pytest.raises(GeometryError):
        PlanarFunnelSpec(-0.1, 1, 1)
    with pytest.raises(GeometryError):
        PlanarFunnelSpec(0.1, 1, 1, nu_plus=0)
    s = PlanarFunnelSpec(0.01, 1, 1)
    assert s.is_asymptotic_regime() and not PlanarFunnelSpec(0.5, 1, 1).is_asymptotic_regime()
    assert s.ell_plus == 1 and s.symmetric


def test_nondimensionalize_examples():
    s = PlanarFunnelSpec(0.02, 2.0, 2.0, ell_plus=2.0, ell_minus=2.0, area=8.0)
    t, k = nondimensionalize(s)
    assert k == 2.0 and t.area == pytest.approx(2.0) and t.eps == pytest.approx(0.01)
    one = PlanarFunnelSpec(0.02, 1.0, 1.0, area=3.0)
    assert nondimensionalize(one)[0] == one


@given(st.floats(1e-3, 0.5), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 50))
def test_nondimensionalize_roundtrip(eps, Rc, rc, ell, area):
    s = PlanarFunnelSpec(eps, Rc, rc, ell_plus=ell, ell_minus=ell, area=area)
    t, k = nondimensionalize(s)
    back = redimensionalize(t, k)
    for f in ("eps", "Rc", "rc", "ell_plus", "ell_minus", "area", "boundary_len"):
        assert getattr(back, f) == pytest.approx(getattr(s, f), rel=1e-14)


def test_needle_spec_and_contains():
    s = NeedleStripSpec(1.0, 0.9)
    assert needle_contains(math.pi / 2, 0.0, s)
    assert not needle_contains(math.pi / 2, 0.06, s)
    assert needle_contains(0.0, 0.49, s)
    assert not needle_contains(0.0, 0.5, s)
    assert s.eps == pytest.approx(0.1)
    with pytest.raises(GeometryError):
        NeedleStripSpec(1.0, 1.1)
    with pytest.raises(GeometryError):
        NeedleStripSpec(1.0, 0.9, DX=0.5, DY=1.0)


# -- profiles ------------------------------------------------------------------


def test_profile_area_examples():
    cyl = cylinder_profile(0.3, 2.0)
    assert profile_area(cyl, -1.0) == pytest.approx(2 * math.pi * 0.3, rel=1e-12)
    assert profile_area(cyl, 0.0) == 0.0
    sph = sphere_profile(1.5, 1e-6)
    assert profile_area(sph, sph.Lambda) == pytest.approx(4 * math.pi * 1.5**2, rel=1e-9)


def test_profile_area_rejects_outside():
    cyl = cylinder_profile(0.3, 2.0)
    with pytest.raises(GeometryError):
        profile_area(cyl, -3.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_profile_area_additive(u, v):
    p = tangent_circle_profile(0.05, 1.0, 0.6)
    t1, t2 = sorted((p.Lambda * u, p.Lambda * v))
    from scipy import integrate

    from narrow_escape.geometry import arc_density

    mid = 2 * math.pi * integrate.quad(lambda s: float(arc_density(p, s)), t1, t2, epsabs=1e-12,
                                       points=[b for b in p.joins if t1 < b < t2] or None)[0]
    assert profile_area(p, t1) == pytest.approx(profile_area(p, t2) + mid, rel=1e-9, abs=1e-12)


def test_sphere_profile_cap_geometry():
    p = sphere_profile(2.0, 0.3)
    assert p.a == pytest.approx(2.0 * math.sin(0.3))
    assert float(p.r(p.Lambda)) == pytest.approx(p.a)
    cap = 2 * math.pi * 4.0 * (1 - math.cos(0.3))
    assert profile_area(p, p.Lambda) == pytest.approx(16 * math.pi - cap, rel=1e-9)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_power_funnel_matches_local_law(nu):
    p = power_funnel_profile(0.02, 1.0, nu)
    assert p.check_funnel_law(rel_tol=1e-9, span=0.01)
    xj = p.joins[0]
    assert float(p.r(xj - 1e-9)) == pytest.approx(float(p.r(xj + 1e-9)), abs=1e-7)
    assert float(p.dr(xj - 1e-9)) == pytest.approx(float(p.dr(xj + 1e-9)), abs=1e-6)


def test_tangent_circle_profile_is_smooth_and_nu1():
    p = tangent_circle_profile(0.02, 1.0, 0.5)
    assert p.check_funnel_law(rel_tol=0.02, span=0.02)
    xt = p.joins[0]
    assert float(p.dr(xt - 1e-10)) == pytest.approx(float(p.dr(xt + 1e-10)), rel=1e-6)
    assert p.Lambda < -1.0


def test_sampled_profile_and_volume():
    x = np.linspace(-2.0, 0.0, 401)
    r = np.sqrt(np.maximum(1 - (x + 1) ** 2, 0)) + 0.0
    r[0] = 1e-3
    with pytest.raises(GeometryError):
        sampled_profile(x[::-1], r)
    sph = sphere_profile(1.0, 1e-4)
    assert profile_volume(sph) == pytest.approx(4 / 3 * math.pi, rel=1e-6)
    assert profile_volume(sph, dim=2) == pytest.approx(math.pi, rel=1e-6)


def test_with_cylinder_extends():
    p = sphere_profile(1.0, 0.2)
    q = with_cylinder(p, 0.5)
    assert q.Lambda == pytest.approx(p.Lambda - 0.5)
    assert profile_area(q, q.Lambda) == pytest.approx(profile_area(p, p.Lambda) + 2 * math.pi * p.a * 0.5,
                                                      rel=1e-9)


# -- planar funnel domain ----------------------------------------------------------


def test_funnel_domain_from_spec_area():
    spec = PlanarFunnelSpec(0.1, 1.0, 1.0, area=math.pi)
    dom = FunnelDomain2D.from_spec(spec)
    assert dom.area == pytest.approx(math.pi, rel=1e-12)
    # Monte Carlo area of the realized region
    rng = np.random.default_rng(0)
    ext = dom.diameter / 2
    pts = rng.uniform(-ext, ext, size=(200_000, 2))
    head, necks = dom.arrays
    inside = sum(funnel2d_inside(x, y, head, necks) for x, y in pts)
    est = inside / len(pts) * (2 * ext) ** 2
    assert est == pytest.approx(math.pi, rel=0.02)


def test_contains_examples():
    spec = PlanarFunnelSpec(0.1, 1.0, 1.0, area=math.pi)
    dom = FunnelDomain2D.from_spec(spec)
    assert contains((0.0, 0.0), dom)
    head, necks = dom.arrays
    g, n = necks[0, 0:2], necks[0, 4:6]
    assert not contains(g + 1e-3 * n, dom)      # beyond the absorbing segment
    assert contains(g - 1e-9 * n, dom)          # just inside the gap centre
    assert not contains(g, dom)                 # the window itself is boundary
    assert dom.on_window(g) == 0
    assert contains((0.0, 0.0), spec)


def test_funnel_domain_rejects_bad_necks():
    with pytest.raises(GeometryError):
        FunnelDomain2D(0.05, (Neck(0.1, 1.0, 1.0),))
    with pytest.raises(GeometryError):
        FunnelDomain2D(1.0, (Neck(0.01, 1.0, 1.0, 0.0), Neck(0.01, 1.0, 1.0, 0.1)))
    FunnelDomain2D(1.0, (Neck(0.01, 1.0, 1.0, 0.0), Neck(0.01, 1.0, 1.0, math.pi)))


def test_reflect_interior_step():
    dom = FunnelDomain2D.from_spec(PlanarFunnelSpec(0.1, 1.0, 1.0))
    res = reflect((0.0, 0.0), (0.01, -0.02), dom)
    assert res.status == "moved"
    np.testing.assert_allclose(res.position, (0.01, -0.02))


def test_reflect_flat_wall_is_mirror():
    # channel |y| < 0.5 of a planar profile domain
    dom = ProfileDomain(cylinder_profile(0.5, 2.0), dim=2)
    d, s = 0.2, 0.4
    res = reflect((-1.0, 0.5 - d), (0.0, s), dom)
    assert res.status == "moved" and res.bounces == 1
    assert res.position[1] == pytest.approx(0.5 - (s - d), abs=1e-12)
    assert res.position[0] == pytest.approx(-1.0)


def test_reflect_absorbs_through_gap():
    dom = FunnelDomain2D.from_spec(PlanarFunnelSpec(0.1, 1.0, 1.0))
    head, necks = dom.arrays
    g, n = necks[0, 0:2], necks[0, 4:6]
    start = g - 0.01 * n
    res = reflect(start, 0.03 * n, dom)
    assert res.absorbed and res.window == 0
    # the reported point is on the window segment
    assert abs((res.position - g) @ n) < 1e-12


def test_reflect_rejects_large_step_and_outside_start():
    dom = BallDomain(1.0, 2)
    with pytest.raises(ValueError):
        reflect((0.0, 0.0), (3.0, 0.0), dom)
    with pytest.raises(ValueError):
        reflect((2.0, 0.0), (0.1, 0.0), dom)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0.001, 0.3), st.floats(0, 2 * math.pi))
def test_reflect_never_leaves(u, phi, step, psi):
    dom = FunnelDomain2D.from_spec(PlanarFunnelSpec(0.05, 1.0, 1.0))
    rho = dom.head_radius * math.sqrt(u) * 0.999
    pos = (rho * math.cos(phi), rho * math.sin(phi))
    res = reflect(pos, (step * math.cos(psi), step * math.sin(psi)), dom)
    if res.status == "moved":
        head, necks = dom.arrays
        x, y = res.position
        # inside or on the reflecting wall up to round-off
        inside = funnel2d_inside(x, y, head, necks) or any(
            funnel2d_inside(x + dx, y + dy, head, necks) for dx, dy in ((1e-9, 0), (-1e-9, 0), (0, 1e-9), (0, -1e-9)))
        assert inside


def test_no_leakage_planar_trajectory():
    dom = FunnelDomain2D.from_spec(PlanarFunnelSpec(0.05, 1.0, 1.0))
    head, necks = dom.arrays
    pts = funnel2d_trajectory(path_rng(3, 0), np.array([0.0, 0.0]), head, necks, 1.0, 1e-3, 20000)
    bad = [p for p in pts if not funnel2d_inside(p[0], p[1], head, necks)]
    # recorded points sit at most at round-off distance outside the closed wall
    for x, y in bad:
        assert any(funnel2d_inside(x + dx, y + dy, head, necks) for dx, dy in ((1e-9, 0), (-1e-9, 0), (0, 1e-9), (0, -1e-9)))
    assert len(pts) > 100


def test_no_leakage_solid_trajectory():
    dom = ProfileDomain(tangent_circle_profile(0.05, 1.0, 0.5), 3)
    prof, rs = dom.arrays
    start = np.array([-0.5, 0.0, 0.0])
    pts = profile_trajectory(path_rng(4, 0), start, prof, rs, 1.0, 1e-4, 20000)
    outside = [p for p in pts if not profile_inside(p[0], p[1] * (1 - 1e-9), p[2] * (1 - 1e-9), prof, rs)]
    assert len(outside) == 0
    assert len(pts) > 100


def test_needle_domain_reflect_and_absorb():
    dom = NeedleDomain(NeedleStripSpec(1.0, 0.9))
    res = reflect((0.0, 0.0), (0.01, 0.01), dom)
    assert res.status == "moved"
    res = reflect((math.pi / 2 - 0.01, 0.0), (0.02, 0.0), dom)
    assert res.absorbed
    res = reflect((0.0, 0.45), (0.0, 0.1), dom)
    assert res.status == "moved" and abs(res.position[1]) < 0.5
