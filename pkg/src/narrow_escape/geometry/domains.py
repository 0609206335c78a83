"""Realized boundaries for Brownian simulation.

Each domain exposes ``contains`` and ``reflect`` in Python and packs its
geometry into float arrays consumed by the numba ``*_move`` routines, which
are shared with the Monte Carlo kernels.

Move status codes: ``MOVED`` (new position written to ``out``), ``ABSORBED``
(crossing point and window index written to ``out``), ``REJECTED`` (more than
``MAX_BOUNCES`` reflections or a numerically lost point; the caller redraws
the Gaussian increment).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit
from scipy.optimize import brentq

from .specs import GeometryError, NeedleStripSpec, PlanarFunnelSpec, RevolutionProfile

MOVED, ABSORBED, REJECTED = 0, 1, 2
MAX_BOUNCES = 8
_TMIN = 1e-9
_N_PROFILE = 2048


# ---------------------------------------------------------------------------
# planar head with tangent-circle necks


@dataclass(frozen=True)
class Neck:
    """One gap of width ``eps`` between circles of radii ``R_up`` and ``R_low``.

    ``angle`` is the polar angle (about the head centre) at which the gap sits.
    """

    eps: float
    R_up: float
    R_low: float
    angle: float = 0.0

    def __post_init__(self):
        for name in ("eps", "R_up", "R_low"):
            if not getattr(self, name) > 0:
                raise GeometryError(f"{name} must be positive")


def _rot(v, c, s):
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _angle(u, v):
    return math.acos(max(-1.0, min(1.0, float(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v)))))


def _dist_to_line(p, a, b):
    d = b - a
    return abs(d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])) / np.linalg.norm(d)


@dataclass(frozen=True)
class FunnelDomain2D:
    """Circular head of radius ``head_radius`` centred at the origin, with necks.

    Each neck is the gap between two disks tangent to the head circle; the
    region is ``(head disk U triangles(O, C_up, C_low)) minus the small
    disks`` and the absorbing window is the gap segment between the disks.
    """

    head_radius: float
    necks: tuple = ()
    _neck_arr: np.ndarray = field(init=False, repr=False, compare=False)
    _head_arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rho = self.head_radius
        if not rho > 0:
            raise GeometryError("head_radius must be positive")
        object.__setattr__(self, "necks", tuple(self.necks))
        if not self.necks:
            raise GeometryError("at least one neck is required (use BallDomain for a plain disk)")
        rows = []
        for nk in self.necks:
            a = 0.5 * nk.eps
            cu = np.array([0.0, a + nk.R_up])
            cl = np.array([0.0, -a - nk.R_low])
            r1, r2 = rho + nk.R_up, rho + nk.R_low
            d = cu[1] - cl[1]
            ll = (d * d + r1 * r1 - r2 * r2) / (2 * d)
            if r1 * r1 - ll * ll <= 0:
                raise GeometryError("neck circles cannot both touch the head")
            h = math.sqrt(r1 * r1 - ll * ll)
            ch = np.array([-h, cu[1] - ll])
            if ch[0] + rho >= 0:
                raise GeometryError("head crosses the gap line; neck too wide for this head")
            beta = math.atan2(-ch[1], -ch[0])
            psi = nk.angle - beta
            c, s = math.cos(psi), math.sin(psi)

            def world(p):
                return _rot(p - ch, c, s)

            g, wu, wl = world(np.zeros(2)), world(cu), world(cl)
            t = _rot(np.array([0.0, 1.0]), c, s)
            n = _rot(np.array([1.0, 0.0]), c, s)
            o = np.zeros(2)
            if _dist_to_line(wu, o, wl) < nk.R_up or _dist_to_line(wl, o, wu) < nk.R_low:
                raise GeometryError("neck circle overflows its triangle; head too small")
            rows.append([g[0], g[1], t[0], t[1], n[0], n[1], a, wu[0], wu[1], nk.R_up, wl[0], wl[1], nk.R_low])
        arr = np.array(rows, dtype=float)
        self._check_separated(arr)
        object.__setattr__(self, "_neck_arr", arr)
        object.__setattr__(self, "_head_arr", np.array([0.0, 0.0, rho, 0.0]))

    @staticmethod
    def _check_separated(arr):
        def wrap(x):
            return (x + math.pi) % (2 * math.pi) - math.pi

        spans = []
        for row in arr:
            mid = math.atan2(row[1], row[0])
            du = wrap(math.atan2(row[8], row[7]) - mid)
            dl = wrap(math.atan2(row[11], row[10]) - mid)
            spans.append((mid, -min(du, dl), max(du, dl)))
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                sep = wrap(spans[j][0] - spans[i][0])
                if sep >= 0:
                    clash = sep < spans[i][2] + spans[j][1]
                else:
                    clash = -sep < spans[i][1] + spans[j][2]
                for bi in (7, 10):
                    for bj in (7, 10):
                        gap = np.linalg.norm(arr[i, bi:bi + 2] - arr[j, bj:bj + 2])
                        clash = clash or gap < arr[i, bi + 2] + arr[j, bj + 2]
                if clash:
                    raise GeometryError("necks overlap")

    @classmethod
    def from_spec(cls, spec: PlanarFunnelSpec) -> "FunnelDomain2D":
        """Single-neck domain whose head radius is tuned so the area equals ``spec.area``."""
        if spec.nu_plus != 1 or spec.nu_minus != 1:
            raise GeometryError("tangent-circle realization needs nu = 1; use ProfileDomain")

        def area(rho):
            return cls(rho, (Neck(spec.eps, spec.Rc, spec.rc),)).area - spec.area

        lo = 2.0 * spec.eps
        while True:
            try:
                cls(lo, (Neck(spec.eps, spec.Rc, spec.rc),))
                break
            except GeometryError:
                lo *= 1.5
        if area(lo) > 0:
            raise GeometryError("requested area is too small for this neck")
        hi = max(2 * lo, math.sqrt(spec.area / math.pi))
        while area(hi) < 0:
            hi *= 2
        return cls(brentq(area, lo, hi, xtol=1e-14, rtol=1e-14), (Neck(spec.eps, spec.Rc, spec.rc),))

    # -- measures -----------------------------------------------------------

    def _triangle_parts(self):
        rho = self.head_radius
        o = np.zeros(2)
        for row in self._neck_arr:
            cu, cl = row[7:9], row[10:12]
            Ru, Rl = row[9], row[12]
            th_o = _angle(cu - o, cl - o)
            th_u = _angle(o - cu, cl - cu)
            th_l = _angle(o - cl, cu - cl)
            tri = 0.5 * abs(cu[0] * cl[1] - cu[1] * cl[0])
            yield tri, th_o, th_u, th_l, rho, Ru, Rl, 2 * row[6]

    @property
    def area(self) -> float:
        tot = math.pi * self.head_radius**2
        for tri, th_o, th_u, th_l, rho, Ru, Rl, _ in self._triangle_parts():
            tot += tri - 0.5 * (th_o * rho**2 + th_u * Ru**2 + th_l * Rl**2)
        return tot

    @property
    def boundary_len(self) -> float:
        tot = 2 * math.pi * self.head_radius
        for _, th_o, th_u, th_l, rho, Ru, Rl, w in self._triangle_parts():
            tot += -th_o * rho + th_u * Ru + th_l * Rl + w
        return tot

    @property
    def gap_centres(self) -> np.ndarray:
        return self._neck_arr[:, 0:2].copy()

    @property
    def arrays(self):
        return self._head_arr, self._neck_arr

    # -- predicates -----------------------------------------------------------

    def contains(self, point) -> bool:
        return bool(funnel2d_inside(float(point[0]), float(point[1]), self._head_arr, self._neck_arr))

    def on_window(self, point, tol: float = 1e-12) -> int:
        """Index of the absorbing window through ``point`` or -1."""
        p = np.asarray(point, dtype=float)
        for k, row in enumerate(self._neck_arr):
            rel = p - row[0:2]
            if abs(rel @ row[4:6]) <= tol and abs(rel @ row[2:4]) <= row[6] + tol:
                return k
        return -1

    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        r = self.head_radius * math.sqrt(rng.random())
        phi = 2 * math.pi * rng.random()
        return np.array([r * math.cos(phi), r * math.sin(phi)])

    @property
    def diameter(self) -> float:
        ext = [self.head_radius]
        for row in self._neck_arr:
            ext.append(float(np.linalg.norm(row[0:2])))
        return 2 * max(ext)


@njit(cache=True, inline="always")
def _cross(ax, ay, bx, by, px, py):
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


@njit(cache=True)
def _in_triangle(px, py, ax, ay, bx, by, cx, cy):
    d1 = _cross(ax, ay, bx, by, px, py)
    d2 = _cross(bx, by, cx, cy, px, py)
    d3 = _cross(cx, cy, ax, ay, px, py)
    return (d1 > 0 and d2 > 0 and d3 > 0) or (d1 < 0 and d2 < 0 and d3 < 0)


@njit(cache=True)
def funnel2d_inside(px, py, head, necks):
    ox, oy, rho = head[0], head[1], head[2]
    inside = (px - ox) ** 2 + (py - oy) ** 2 < rho * rho
    for k in range(necks.shape[0]):
        if (px - necks[k, 7]) ** 2 + (py - necks[k, 8]) ** 2 <= necks[k, 9] ** 2:
            return False
        if (px - necks[k, 10]) ** 2 + (py - necks[k, 11]) ** 2 <= necks[k, 12] ** 2:
            return False
        if not inside:
            if _in_triangle(px, py, ox, oy, necks[k, 7], necks[k, 8], necks[k, 10], necks[k, 11]):
                inside = True
    return inside


@njit(cache=True)
def _in_any_triangle(px, py, head, necks):
    for k in range(necks.shape[0]):
        if _in_triangle(px, py, head[0], head[1], necks[k, 7], necks[k, 8], necks[k, 10], necks[k, 11]):
            return True
    return False


@njit(cache=True)
def funnel2d_move(px, py, dx, dy, head, necks, out):
    """Advance ``(px, py)`` by ``(dx, dy)`` with specular reflection.

    ``out[0:2]`` receives the new position (or crossing point), ``out[2]``
    the neck index on absorption and ``out[3]`` the bounce count.
    """
    ox, oy, rho = head[0], head[1], head[2]
    out[3] = 0.0
    qx, qy = px + dx, py + dy
    if (px - ox) ** 2 + (py - oy) ** 2 < rho * rho and (qx - ox) ** 2 + (qy - oy) ** 2 < rho * rho:
        out[0], out[1] = qx, qy
        return 0
    for bounce in range(MAX_BOUNCES + 1):
        A = dx * dx + dy * dy
        if A == 0.0:
            out[0], out[1] = px, py
            return 0
        best = 1.0
        kind = -1  # 0 head, 1 upper disk, 2 lower disk, 3 window
        which = -1
        # head circle, outward crossing only
        B = 2.0 * (dx * (px - ox) + dy * (py - oy))
        C = (px - ox) ** 2 + (py - oy) ** 2 - rho * rho
        disc = B * B - 4.0 * A * C
        if disc >= 0.0:
            t2 = (-B + math.sqrt(disc)) / (2.0 * A)
            if _TMIN < t2 <= best:
                hx, hy = px + t2 * dx, py + t2 * dy
                if not _in_any_triangle(hx, hy, head, necks):
                    best, kind = t2, 0
        for k in range(necks.shape[0]):
            for side in range(2):
                cx = necks[k, 7 + 3 * side]
                cy = necks[k, 8 + 3 * side]
                R = necks[k, 9 + 3 * side]
                B = 2.0 * (dx * (px - cx) + dy * (py - cy))
                C = (px - cx) ** 2 + (py - cy) ** 2 - R * R
                disc = B * B - 4.0 * A * C
                if C > 0.0 and disc > 0.0:
                    t1 = (-B - math.sqrt(disc)) / (2.0 * A)
                    if _TMIN < t1 <= best:
                        best, kind, which = t1, 1 + side, k
            # window: line through the gap centre with normal n
            sp = (px - necks[k, 0]) * necks[k, 4] + (py - necks[k, 1]) * necks[k, 5]
            dn = dx * necks[k, 4] + dy * necks[k, 5]
            if sp < 0.0 and dn > 0.0:
                t = -sp / dn
                if t <= best:
                    hx, hy = px + t * dx, py + t * dy
                    off = (hx - necks[k, 0]) * necks[k, 2] + (hy - necks[k, 1]) * necks[k, 3]
                    if abs(off) < necks[k, 6]:
                        best, kind, which = t, 3, k
        if kind == -1:
            qx, qy = px + dx, py + dy
            if funnel2d_inside(qx, qy, head, necks):
                out[0], out[1] = qx, qy
                return 0
            return 2
        hx, hy = px + best * dx, py + best * dy
        if kind == 3:
            out[0], out[1], out[2] = hx, hy, which
            return 1
        if kind == 0:
            nx, ny = (hx - ox) / rho, (hy - oy) / rho
        else:
            base = 7 + 3 * (kind - 1)
            R = necks[which, base + 2]
            nx, ny = (necks[which, base] - hx) / R, (necks[which, base + 1] - hy) / R
        rx, ry = (1.0 - best) * dx, (1.0 - best) * dy
        dot = rx * nx + ry * ny
        dx, dy = rx - 2.0 * dot * nx, ry - 2.0 * dot * ny
        px, py = hx, hy
        out[3] = bounce + 1.0
    return 2


# ---------------------------------------------------------------------------
# all-absorbing ball / disk (calibration)


@dataclass(frozen=True)
class BallDomain:
    """Disk (``dim=2``) or ball (``dim=3``) whose whole boundary absorbs."""

    radius: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("radius must be positive")
        if self.dim not in (2, 3):
            raise GeometryError("dim must be 2 or 3")

    @property
    def arrays(self):
        return (np.array([self.radius, float(self.dim)]),)

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    @property
    def volume(self) -> float:
        return math.pi * self.radius**2 if self.dim == 2 else 4 / 3 * math.pi * self.radius**3

    def contains(self, point) -> bool:
        return float(np.sum(np.square(point))) < self.radius**2

    def on_window(self, point, tol: float = 1e-12) -> int:
        return 0 if abs(math.sqrt(float(np.sum(np.square(point)))) - self.radius) <= tol else -1

    def exact_mfpt(self, point, D: float = 1.0) -> float:
        return (self.radius**2 - float(np.sum(np.square(point)))) / (2 * self.dim * D)


@njit(cache=True)
def ball_move(p, d, R, out):
    """Chord test against the sphere ``|x| = R``; ``p``, ``d`` length-3 arrays."""
    A = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    B = 2.0 * (p[0] * d[0] + p[1] * d[1] + p[2] * d[2])
    C = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - R * R
    q2 = (p[0] + d[0]) ** 2 + (p[1] + d[1]) ** 2 + (p[2] + d[2]) ** 2
    if q2 < R * R:
        for i in range(3):
            out[i] = p[i] + d[i]
        return 0
    t = (-B + math.sqrt(max(B * B - 4.0 * A * C, 0.0))) / (2.0 * A)
    for i in range(3):
        out[i] = p[i] + t * d[i]
    out[3] = 0.0
    return 1


# ---------------------------------------------------------------------------
# solids (dim 3) and planar regions (dim 2) generated by a profile


@dataclass(frozen=True)
class ProfileDomain:
    """``{rho < r(x), Lambda < x < 0}`` with ``rho = |y|`` (2D) or ``sqrt(y^2+z^2)`` (3D).

    The profile is sampled on a uniform grid and interpolated linearly. The
    end ``x = Lambda`` (disk or segment of radius ``a``) absorbs, the rest
    of the boundary reflects.
    """

    profile: RevolutionProfile
    dim: int = 3
    n_samples: int = _N_PROFILE
    _arr: np.ndarray = field(init=False, repr=False, compare=False)
    _r: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise GeometryError("dim must be 2 or 3")
        p = self.profile
        xs = np.linspace(p.Lambda, 0.0, self.n_samples)
        r = np.asarray(p.r(xs), dtype=float).copy()
        r[0] = p.a
        r = np.maximum(r, 0.0)
        if np.any(r[:-1] <= 0):
            raise GeometryError("profile radius vanishes inside the domain")
        h = xs[1] - xs[0]
        x_star = float(xs[int(np.argmax(r))])
        object.__setattr__(self, "_r", r)
        object.__setattr__(self, "_arr", np.array([p.Lambda, h, p.a, float(self.dim), x_star, r.max()]))

    @property
    def arrays(self):
        return self._arr, self._r

    @property
    def diameter(self) -> float:
        return max(abs(self.profile.Lambda), 2 * float(self._r.max()))

    def contains(self, point) -> bool:
        pt = np.zeros(3)
        pt[: len(point)] = point
        return bool(profile_inside(pt[0], pt[1], pt[2], self._arr, self._r))

    def on_window(self, point, tol: float = 1e-12) -> int:
        pt = np.zeros(3)
        pt[: len(point)] = point
        rho = math.hypot(pt[1], pt[2])
        return 0 if abs(pt[0] - self.profile.Lambda) <= tol and rho <= self.profile.a + tol else -1


@njit(cache=True)
def profile_radius(x, prof, rs):
    lam, h = prof[0], prof[1]
    if x <= lam:
        return prof[2]
    if x >= 0.0:
        return -x
    u = (x - lam) / h
    i = int(u)
    n = rs.shape[0]
    if i >= n - 1:
        return rs[n - 1]
    f = u - i
    return rs[i] * (1.0 - f) + rs[i + 1] * f


@njit(cache=True)
def profile_slope(x, prof, rs):
    lam, h = prof[0], prof[1]
    n = rs.shape[0]
    if x <= lam:
        return 0.0
    if x >= 0.0:
        return -1e300
    i = min(int((x - lam) / h), n - 2)
    return (rs[i + 1] - rs[i]) / h


@njit(cache=True)
def profile_inside(x, y, z, prof, rs):
    if x <= prof[0] or x >= 0.0:
        return False
    return math.sqrt(y * y + z * z) < profile_radius(x, prof, rs)


@njit(cache=True)
def _g(x, y, z, prof, rs):
    return math.sqrt(y * y + z * z) - profile_radius(x, prof, rs)


@njit(cache=True)
def _bisect(px, py, pz, dx, dy, dz, lo, hi, prof, rs):
    # g(p + lo d) < 0 <= g(p + hi d); returns the inside end
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _g(px + mid * dx, py + mid * dy, pz + mid * dz, prof, rs) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return lo


@njit(cache=True)
def profile_move(p, d, prof, rs, out):
    """Move ``p`` by ``d`` inside a profile domain; arrays of length 3."""
    lam, a = prof[0], prof[2]
    px, py, pz = p[0], p[1], p[2]
    dx, dy, dz = d[0], d[1], d[2]
    out[4] = 0.0
    for bounce in range(MAX_BOUNCES + 1):
        qx, qy, qz = px + dx, py + dy, pz + dz
        if qx > lam and _g(qx, qy, qz, prof, rs) < 0.0:
            out[0], out[1], out[2] = qx, qy, qz
            return 0
        hi = 1.0
        if qx <= lam:
            ts = (lam - px) / (qx - px)
            cx, cy, cz = px + ts * dx, py + ts * dy, pz + ts * dz
            if math.sqrt(cy * cy + cz * cz) < a:
                out[0], out[1], out[2], out[3] = lam, cy, cz, 0.0
                return 1
            hi = ts
        t = _bisect(px, py, pz, dx, dy, dz, 0.0, hi, prof, rs)
        hx, hy, hz = px + t * dx, py + t * dy, pz + t * dz
        rho = math.sqrt(hy * hy + hz * hz)
        # outward normal of {rho - r(x) > 0}
        nx = -profile_slope(hx, prof, rs)
        if nx > 1e150:
            nx, ny, nz = 1.0, 0.0, 0.0
        elif rho > 0.0:
            ny, nz = hy / rho, hz / rho
        else:
            ny, nz = 0.0, 0.0
        nrm = math.sqrt(nx * nx + ny * ny + nz * nz)
        nx, ny, nz = nx / nrm, ny / nrm, nz / nrm
        rx, ry, rz = (1.0 - t) * dx, (1.0 - t) * dy, (1.0 - t) * dz
        dot = rx * nx + ry * ny + rz * nz
        if dot < 0.0:
            dot = 0.0
        dx, dy, dz = rx - 2.0 * dot * nx, ry - 2.0 * dot * ny, rz - 2.0 * dot * nz
        px, py, pz = hx, hy, hz
        out[4] = bounce + 1.0
    return 2


# ---------------------------------------------------------------------------
# Brownian needle in a strip: configuration space (theta, y)


@dataclass(frozen=True)
class NeedleDomain:
    """Configuration space ``|y| < (l0 - l |sin theta|)/2``, ``|theta| < pi/2``.

    Orientations ``theta`` and ``-theta`` are equivalent, so the reflecting
    line ``theta = 0`` is unfolded; the window is ``|theta| = pi/2``.
    """

    spec: NeedleStripSpec

    @property
    def arrays(self):
        s = self.spec
        return (np.array([s.l0, s.l, s.DX, s.DY, s.Dr]),)

    @property
    def diameter(self) -> float:
        return max(math.pi, self.spec.l0)

    def contains(self, point) -> bool:
        th, y = float(point[0]), float(point[1])
        return abs(th) < math.pi / 2 and needle_inside(th, y, self.arrays[0])

    def on_window(self, point, tol: float = 1e-12) -> int:
        th, y = float(point[0]), float(point[1])
        half = 0.5 * (self.spec.l0 - self.spec.l)
        return 0 if abs(abs(th) - math.pi / 2) <= tol and abs(y) <= half + tol else -1


@njit(cache=True)
def needle_inside(th, y, nd):
    return abs(y) < 0.5 * (nd[0] - nd[1] * abs(math.sin(th)))


@njit(cache=True)
def _needle_g(th, y, nd):
    return abs(y) - 0.5 * (nd[0] - nd[1] * abs(math.sin(th)))


@njit(cache=True)
def needle_move(th, y, dth, dy, nd, out):
    """Step in ``(theta, y)``; reflection is specular in the metric scaled by
    ``diag(Dr, D_y(theta))`` at the hit point (co-normal reflection)."""
    half_pi = 0.5 * math.pi
    Dr = nd[4]
    out[3] = 0.0
    for bounce in range(MAX_BOUNCES + 1):
        qt, qy = th + dth, y + dy
        hi = 1.0
        if abs(qt) >= half_pi:
            lim = half_pi if qt > 0 else -half_pi
            ts = (lim - th) / dth
            cy = y + ts * dy
            if abs(cy) < 0.5 * (nd[0] - nd[1]):
                out[0], out[1], out[2] = lim, cy, 0.0
                return 1
            hi = ts
        elif _needle_g(qt, qy, nd) < 0.0:
            out[0], out[1] = qt, qy
            return 0
        lo = 0.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _needle_g(th + mid * dth, y + mid * dy, nd) < 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15:
                break
        t = lo
        ht, hy = th + t * dth, y + t * dy
        s = math.sin(ht)
        Dy = nd[2] * s * s + nd[3] * (1.0 - s * s)
        sy = 1.0 if hy >= 0 else -1.0
        sgn = 1.0 if ht >= 0 else -1.0
        gth = 0.5 * nd[1] * math.cos(ht) * sgn
        # gradient in scaled coordinates u = theta/sqrt(Dr), v = y/sqrt(Dy)
        nu_, nv = gth * math.sqrt(Dr), sy * math.sqrt(Dy)
        nrm = math.sqrt(nu_ * nu_ + nv * nv)
        nu_, nv = nu_ / nrm, nv / nrm
        ru = (1.0 - t) * dth / math.sqrt(Dr)
        rv = (1.0 - t) * dy / math.sqrt(Dy)
        dot = ru * nu_ + rv * nv
        if dot < 0.0:
            dot = 0.0
        ru, rv = ru - 2.0 * dot * nu_, rv - 2.0 * dot * nv
        dth, dy = ru * math.sqrt(Dr), rv * math.sqrt(Dy)
        th, y = ht, hy
        out[3] = bounce + 1.0
    return 2


# ---------------------------------------------------------------------------
# generic front ends


@dataclass(frozen=True)
class StepResult:
    position: np.ndarray
    status: str
    window: Optional[int] = None
    bounces: int = 0

    @property
    def absorbed(self) -> bool:
        return self.status == "absorbed"


_STATUS = {MOVED: "moved", ABSORBED: "absorbed", REJECTED: "rejected"}


def contains(point, domain) -> bool:
    """True iff ``point`` lies strictly inside ``domain``."""
    if isinstance(domain, NeedleStripSpec):
        domain = NeedleDomain(domain)
    if isinstance(domain, PlanarFunnelSpec):
        domain = FunnelDomain2D.from_spec(domain)
    return domain.contains(point)


def reflect(pos: Sequence[float], step: Sequence[float], domain) -> StepResult:
    """Apply one displacement with specular reflection; absorption is reported.

    For :class:`NeedleDomain` the coordinates are ``(theta, y)`` and the
    reflection is co-normal. Raises ``ValueError`` for steps longer than the
    domain diameter.
    """
    if isinstance(domain, PlanarFunnelSpec):
        domain = FunnelDomain2D.from_spec(domain)
    if isinstance(domain, NeedleStripSpec):
        domain = NeedleDomain(domain)
    pos = np.asarray(pos, dtype=float)
    step = np.asarray(step, dtype=float)
    if pos.shape != step.shape:
        raise ValueError("pos and step must have the same shape")
    if float(np.linalg.norm(step)) > domain.diameter:
        raise ValueError("step longer than the domain diameter; time step too coarse")
    if not domain.contains(pos):
        raise ValueError("pos must lie inside the domain")
    out = np.zeros(5)
    n = pos.size
    if isinstance(domain, FunnelDomain2D):
        head, necks = domain.arrays
        code = funnel2d_move(pos[0], pos[1], step[0], step[1], head, necks, out)
        res, win, nb = out[:2].copy(), int(out[2]), int(out[3])
    elif isinstance(domain, ProfileDomain):
        p3, d3 = np.zeros(3), np.zeros(3)
        p3[:n], d3[:n] = pos, step
        code = profile_move(p3, d3, *domain.arrays, out)
        res, win, nb = out[:n].copy(), 0, int(out[4])
    elif isinstance(domain, BallDomain):
        p3, d3 = np.zeros(3), np.zeros(3)
        p3[:n], d3[:n] = pos, step
        code = ball_move(p3, d3, domain.radius, out)
        res, win, nb = out[:n].copy(), 0, 0
    elif isinstance(domain, NeedleDomain):
        code = needle_move(pos[0], pos[1], step[0], step[1], domain.arrays[0], out)
        res, win, nb = out[:2].copy(), 0, int(out[3])
    else:
        raise TypeError(f"unsupported domain {type(domain).__name__}")
    return StepResult(res, _STATUS[code], win if code == ABSORBED else None, nb)
