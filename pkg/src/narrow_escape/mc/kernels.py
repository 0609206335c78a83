"""Single-path Euler-Maruyama kernels.

Each kernel simulates one trajectory with its own ``np.random.Generator``
and returns ``(time, window, status, rejections)`` with ``status`` 1 when
absorbed and 0 when censored at ``max_time``. Kernels release the GIL.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..geometry.domains import (
    ABSORBED,
    REJECTED,
    ball_move,
    funnel2d_move,
    needle_move,
    profile_inside,
    profile_move,
)

BLOCK = 2048
_MAX_REJECT = 1000


@njit(nogil=True, cache=True)
def _uniform_in_head(rng, head):
    r = head[2] * math.sqrt(rng.random())
    phi = 2.0 * math.pi * rng.random()
    return head[0] + r * math.cos(phi), head[1] + r * math.sin(phi)


@njit(nogil=True, cache=True)
def funnel2d_path(rng, start, random_start, head, necks, D, dt, refine, max_time):
    if random_start:
        px, py = _uniform_in_head(rng, head)
    else:
        px, py = start[0], start[1]
    out = np.zeros(4)
    zone2 = (4.0 * math.sqrt(2.0 * D * dt)) ** 2
    buf = rng.standard_normal(BLOCK)
    k = 0
    t = 0.0
    nrej = 0
    streak = 0
    while t < max_time:
        h = dt
        if refine > 1:
            for j in range(necks.shape[0]):
                if (px - necks[j, 0]) ** 2 + (py - necks[j, 1]) ** 2 < zone2:
                    h = dt / refine
                    break
        if k + 2 > BLOCK:
            buf = rng.standard_normal(BLOCK)
            k = 0
        s = math.sqrt(2.0 * D * h)
        dx, dy = s * buf[k], s * buf[k + 1]
        k += 2
        code = funnel2d_move(px, py, dx, dy, head, necks, out)
        if code == REJECTED:
            nrej += 1
            streak += 1
            if streak < _MAX_REJECT:
                continue
            t += h
            streak = 0
            continue
        streak = 0
        t += h
        if code == ABSORBED:
            return t, int(out[2]), 1, nrej
        px, py = out[0], out[1]
    return t, -1, 0, nrej


@njit(nogil=True, cache=True)
def _uniform_in_profile(rng, prof, rs):
    lam, dim, xs, rmax = prof[0], prof[3], prof[4], prof[5]
    while True:
        x = xs + (0.0 - xs) * rng.random()
        y = rmax * (2.0 * rng.random() - 1.0)
        z = 0.0
        if dim == 3.0:
            z = rmax * (2.0 * rng.random() - 1.0)
        if x > lam and profile_inside(x, y, z, prof, rs):
            return x, y, z


@njit(nogil=True, cache=True)
def profile_path(rng, start, random_start, prof, rs, D, dt, refine, max_time):
    p = np.zeros(3)
    d = np.zeros(3)
    out = np.zeros(5)
    if random_start:
        p[0], p[1], p[2] = _uniform_in_profile(rng, prof, rs)
    else:
        p[0], p[1], p[2] = start[0], start[1], start[2]
    three = prof[3] == 3.0
    lam = prof[0]
    zone = 4.0 * math.sqrt(2.0 * D * dt)
    buf = rng.standard_normal(BLOCK)
    k = 0
    t = 0.0
    nrej = 0
    streak = 0
    while t < max_time:
        h = dt
        if refine > 1 and p[0] - lam < zone:
            h = dt / refine
        if k + 3 > BLOCK:
            buf = rng.standard_normal(BLOCK)
            k = 0
        s = math.sqrt(2.0 * D * h)
        d[0] = s * buf[k]
        d[1] = s * buf[k + 1]
        if three:
            d[2] = s * buf[k + 2]
            k += 3
        else:
            d[2] = 0.0
            k += 2
        code = profile_move(p, d, prof, rs, out)
        if code == REJECTED:
            nrej += 1
            streak += 1
            if streak < _MAX_REJECT:
                continue
            t += h
            streak = 0
            continue
        streak = 0
        t += h
        if code == ABSORBED:
            return t, 0, 1, nrej
        p[0], p[1], p[2] = out[0], out[1], out[2]
    return t, -1, 0, nrej


@njit(nogil=True, cache=True)
def ball_path(rng, start, R, dim, D, dt, max_time):
    p = np.zeros(3)
    d = np.zeros(3)
    out = np.zeros(4)
    for i in range(dim):
        p[i] = start[i]
    s = math.sqrt(2.0 * D * dt)
    buf = rng.standard_normal(BLOCK)
    k = 0
    t = 0.0
    while t < max_time:
        if k + dim > BLOCK:
            buf = rng.standard_normal(BLOCK)
            k = 0
        for i in range(dim):
            d[i] = s * buf[k + i]
        k += dim
        t += dt
        if ball_move(p, d, R, out) == ABSORBED:
            return t, 0, 1, 0
        for i in range(dim):
            p[i] = out[i]
    return t, -1, 0, 0


@njit(nogil=True, cache=True)
def _interp_uniform(z, z0, hz, vals):
    u = (z - z0) / hz
    if u <= 0.0:
        return vals[0]
    n = vals.shape[0]
    i = int(u)
    if i >= n - 1:
        return vals[n - 1]
    f = u - i
    return vals[i] * (1.0 - f) + vals[i + 1] * f


@njit(nogil=True, cache=True)
def surface_path(rng, z_start, zgrid0, hz, avals, bvals, lam, dt, refine, max_time):
    """``dz = a dt + b dw`` on ``(lam, 0)``; reflect at 0, absorb at ``lam``.

    Coefficients are interpolated on the sample grid and held at its last
    value in the sliver between the last sample and the pole.
    """
    z = z_start
    bmax = 0.0
    for i in range(bvals.shape[0]):
        bmax = max(bmax, bvals[i])
    zone = 4.0 * bmax * math.sqrt(dt)
    buf = rng.standard_normal(BLOCK)
    k = 0
    t = 0.0
    while t < max_time:
        h = dt
        if refine > 1 and z - lam < zone:
            h = dt / refine
        if k + 1 > BLOCK:
            buf = rng.standard_normal(BLOCK)
            k = 0
        a = _interp_uniform(z, zgrid0, hz, avals)
        b = _interp_uniform(z, zgrid0, hz, bvals)
        z = z + a * h + b * math.sqrt(h) * buf[k]
        k += 1
        t += h
        if z <= lam:
            return t, 0, 1, 0
        if z > 0.0:
            z = -z
            if z <= lam:
                return t, 0, 1, 0
    return t, -1, 0, 0


@njit(nogil=True, cache=True)
def needle_path(rng, th0, y0, nd, dt, refine, max_time):
    """Orientation ``theta`` and transverse offset ``y`` of the needle.

    ``dtheta = sqrt(2 Dr) dw3``, ``dy = sin(theta) sqrt(2 DX) dw1 + cos(theta) sqrt(2 DY) dw2``.
    """
    th, y = th0, y0
    DX, DY, Dr = nd[2], nd[3], nd[4]
    out = np.zeros(4)
    half_pi = 0.5 * math.pi
    zone = 4.0 * math.sqrt(2.0 * Dr * dt)
    buf = rng.standard_normal(BLOCK)
    k = 0
    t = 0.0
    nrej = 0
    streak = 0
    while t < max_time:
        h = dt
        if refine > 1 and half_pi - abs(th) < zone:
            h = dt / refine
        if k + 3 > BLOCK:
            buf = rng.standard_normal(BLOCK)
            k = 0
        sq = math.sqrt(2.0 * h)
        s, c = math.sin(th), math.cos(th)
        dth = sq * math.sqrt(Dr) * buf[k + 2]
        dy = sq * (s * math.sqrt(DX) * buf[k] + c * math.sqrt(DY) * buf[k + 1])
        k += 3
        code = needle_move(th, y, dth, dy, nd, out)
        if code == REJECTED:
            nrej += 1
            streak += 1
            if streak < _MAX_REJECT:
                continue
            t += h
            streak = 0
            continue
        streak = 0
        t += h
        if code == ABSORBED:
            return t, 0, 1, nrej
        th, y = out[0], out[1]
    return t, -1, 0, nrej


@njit(nogil=True, cache=True)
def funnel2d_trajectory(rng, start, head, necks, D, dt, n_steps):
    """Recorded positions of one path (for leakage checks); stops on absorption."""
    pts = np.empty((n_steps + 1, 2))
    pts[0, 0], pts[0, 1] = start[0], start[1]
    out = np.zeros(4)
    px, py = start[0], start[1]
    s = math.sqrt(2.0 * D * dt)
    n = 1
    for _ in range(n_steps):
        code = funnel2d_move(px, py, s * rng.standard_normal(), s * rng.standard_normal(), head, necks, out)
        if code == REJECTED:
            continue
        if code == ABSORBED:
            break
        px, py = out[0], out[1]
        pts[n, 0], pts[n, 1] = px, py
        n += 1
    return pts[:n]


@njit(nogil=True, cache=True)
def profile_trajectory(rng, start, prof, rs, D, dt, n_steps):
    pts = np.empty((n_steps + 1, 3))
    p = np.zeros(3)
    d = np.zeros(3)
    out = np.zeros(5)
    for i in range(3):
        p[i] = start[i]
        pts[0, i] = start[i]
    s = math.sqrt(2.0 * D * dt)
    three = prof[3] == 3.0
    n = 1
    for _ in range(n_steps):
        d[0] = s * rng.standard_normal()
        d[1] = s * rng.standard_normal()
        d[2] = s * rng.standard_normal() if three else 0.0
        code = profile_move(p, d, prof, rs, out)
        if code == REJECTED:
            continue
        if code == ABSORBED:
            break
        for i in range(3):
            p[i] = out[i]
            pts[n, i] = out[i]
        n += 1
    return pts[:n]
