"""Independent quadrature references for the fast convolution sweeps.

Everything here evaluates the defining integrals directly with adaptive
quadrature on exact callables, so these routines share no code path with the
O(N) sweep implementation they are used to check.  They are slow and meant
for tests only.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.integrate import quad

_QUAD_OPTS = dict(limit=400, epsabs=1e-12, epsrel=1e-12)


def _split_quad(f: Callable[[float], float], lo: float, hi: float, x: float) -> float:
    """Integrate with explicit breakpoints at y = 0 and y = x."""
    pts = sorted({lo, hi, 0.0, float(x)})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a and b > lo and a < hi:
            total += quad(f, max(a, lo), min(b, hi), **_QUAD_OPTS)[0]
    return total


def density(v: Callable, vx: Callable) -> Callable[[float], float]:
    """Density a(y) = v(y)^2 + v'(y)^2 / 2 from exact callables."""

    def a(y: float) -> float:
        return v(y) ** 2 + 0.5 * vx(y) ** 2

    return a


def conv_Q_quadrature(
    v: Callable, vx: Callable, x: float, half_width: float = 50.0
) -> float:
    """Q[v](x) = 1/2 int phi'(x - y) a(y) dy by adaptive quadrature."""
    a = density(v, vx)

    def f(y: float) -> float:
        d = x - y
        return -np.sign(d) * np.exp(-abs(d)) * a(y)

    return 0.5 * _split_quad(f, -half_width, half_width, x)


def conv_P_quadrature(
    v: Callable, vx: Callable, x: float, half_width: float = 50.0
) -> float:
    """P[v](x) = 1/2 int phi(x - y) a(y) dy by adaptive quadrature."""
    a = density(v, vx)

    def f(y: float) -> float:
        return np.exp(-abs(x - y)) * a(y)

    return 0.5 * _split_quad(f, -half_width, half_width, x)


def lin_conv_lhs_quadrature(
    v: Callable, vx: Callable, x: float, half_width: float = 50.0
) -> float:
    """phi' * (phi v + 1/2 phi' v_x) at x, by adaptive quadrature."""

    def f(y: float) -> float:
        d = x - y
        pd = -np.sign(d) * np.exp(-abs(d))
        py = np.exp(-abs(y))
        pyp = -np.sign(y) * py
        return pd * (py * v(y) + 0.5 * pyp * vx(y))

    return _split_quad(f, -half_width, half_width, x)
