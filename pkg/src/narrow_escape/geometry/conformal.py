"""Disk automorphisms that straighten the gap between two near-tangent circles."""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np

_POLE_TOL = 1e-14


def mobius_map(z, alpha):
    """w = (z - alpha) / (1 - alpha z).

    Works on scalars and arrays. Raises ``ZeroDivisionError`` at the pole
    ``z = 1/alpha``.
    """
    z = np.asarray(z, dtype=complex)
    den = 1 - alpha * z
    if np.any(np.abs(den) <= _POLE_TOL * np.maximum(1.0, np.abs(alpha * z))):
        raise ZeroDivisionError("mobius_map evaluated at its pole z = 1/alpha")
    w = (z - alpha) / den
    return w[()] if w.ndim == 0 else w


def mobius_inverse(w, alpha):
    """Inverse of :func:`mobius_map`: z = (w + alpha) / (1 + alpha w)."""
    w = np.asarray(w, dtype=complex)
    den = 1 + alpha * w
    if np.any(np.abs(den) <= _POLE_TOL * np.maximum(1.0, np.abs(alpha * w))):
        raise ZeroDivisionError("mobius_inverse evaluated at its pole w = -1/alpha")
    z = (w + alpha) / den
    return z[()] if z.ndim == 0 else z


def mobius_derivative(z, alpha):
    return (1 - alpha**2) / (1 - alpha * np.asarray(z, dtype=complex)) ** 2


class FunnelAlpha(NamedTuple):
    leading: float
    exact: float


def funnel_alpha(Rc: float, rc: float, eps: float) -> FunnelAlpha:
    """Real Möbius parameter that maps both gap circles onto concentric circles.

    ``eps`` is the gap measured in units of ``Rc`` (the circle of radius
    ``Rc`` becomes the unit circle); ``rc`` only enters through ``rc/Rc``.
    Of the two roots the one inside the unit disk is returned, together
    with its leading-order approximation ``-1 + sqrt(2 rc eps / (Rc + rc))``.
    """
    if not (Rc > 0 and rc > 0):
        raise ValueError("Rc and rc must be positive")
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    den = 2 * (eps * Rc + rc + Rc)
    centre = -(2 * eps * Rc + 2 * Rc + eps**2 * Rc + 2 * rc * eps + 2 * rc) / den
    disc = eps * (
        8 * Rc * rc
        + 4 * eps * Rc**2
        + 12 * eps * Rc * rc
        + 4 * eps**2 * Rc**2
        + 8 * rc**2
        + 4 * eps**2 * Rc * rc
        + eps**3 * Rc**2
        + 4 * eps * rc**2
    )
    if disc < 0:
        raise ArithmeticError("negative discriminant in funnel_alpha")
    exact = centre + math.sqrt(disc) / den
    leading = -1 + math.sqrt(2 * rc * eps / (Rc + rc))
    return FunnelAlpha(leading, exact)


def concentric_image(centre: complex, radius: float, alpha: float) -> tuple[complex, float]:
    """Image circle (centre, radius) of a circle under :func:`mobius_map`.

    Uses three image points, so it is independent of the closed form used
    in :func:`funnel_alpha`.
    """
    pts = [mobius_map(centre + radius * cmath.exp(1j * t), alpha) for t in (0.3, 2.1, 4.4)]
    (x1, y1), (x2, y2), (x3, y3) = [(p.real, p.imag) for p in pts]
    a = np.array([[x2 - x1, y2 - y1], [x3 - x1, y3 - y1]])
    b = 0.5 * np.array([x2**2 - x1**2 + y2**2 - y1**2, x3**2 - x1**2 + y3**2 - y1**2])
    cx, cy = np.linalg.solve(a, b)
    return complex(cx, cy), float(abs(pts[0] - complex(cx, cy)))
