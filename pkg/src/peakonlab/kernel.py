"""Green function phi(x) = exp(-|x|) and the nonlocal operators Q and P.

Both operators convolve the density a = v^2 + v_x^2 / 2 against phi' (for Q)
or phi (for P).  Splitting the kernel at y = x gives two one-sided
exponentially weighted integrals that are accumulated in a single O(N) sweep
each.  Within every grid cell the density is reconstructed as a cubic Hermite
polynomial (node values plus finite-difference slopes per smooth segment) and
the product (cubic) * exp(+-y) is integrated in closed form, so the sweep has
no quadrature nodes beyond the grid itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, InputDataError
from .field import PeakedField, _hermite_powers, integral_from_zero_at, value_at


def phi(x):
    """Green function of (1 - d^2/dx^2) u = 2 delta."""
    return np.exp(-np.abs(x))


def phi_prime(x):
    """Derivative of phi with the peak convention phi'(0) = 0."""
    x = np.asarray(x)
    out = -np.sign(x) * np.exp(-np.abs(x))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ExpSweepAccumulators:
    """One-sided exponential integrals of a density g at every node.

    ``left[i]``  holds int_{-L}^{x_i} e^{y}  g(y) dy,
    ``right[i]`` holds int_{x_i}^{L}  e^{-y} g(y) dy,
    with the tails beyond the grid truncated to zero, so left[0] = 0 and
    right[-1] = 0 by construction.
    """

    left: np.ndarray
    right: np.ndarray


# ---------------------------------------------------------------------------
# closed-form cell moments
#
# M_k(h) = int_0^h u^k e^{-u} du        (weight anchored at the left node)
# B_k(h) = int_0^h u^k e^{u-h} du       (weight anchored at the right node)
#
# The closed forms cancel catastrophically for small h, so a truncated power
# series takes over below h = 0.5 (16 terms leave relative error < 1e-16).

_SERIES_TERMS = 16


def _series_coeffs(k: int) -> list[float]:
    out, fact = [], 1.0
    for j in range(_SERIES_TERMS):
        if j > 1:
            fact *= j
        out.append(1.0 / (fact * (k + j + 1)))
    return out


_SER = {k: _series_coeffs(k) for k in (1, 2, 3)}


def _moment_series(h, k, signed):
    # h^{k+1} * sum_j (s h)^j / (j! (k+j+1)) with s = -1 for M, +1 for B-core
    coeffs = _SER[k]
    sh = signed * h
    acc = np.full_like(h, coeffs[-1])
    for j in range(_SERIES_TERMS - 2, -1, -1):
        acc = acc * sh + coeffs[j]
    return acc * h ** (k + 1)


def _exp_cell_moments(h):
    """Arrays (M0..M3, B0..B3) for a vector of cell widths h > 0."""
    h = np.asarray(h, dtype=float)
    eh = np.exp(-h)
    small = h < 0.5

    m0 = -np.expm1(-h)
    m1 = m0 - h * eh
    m2 = 2.0 * m1 - h * h * eh
    m3 = 3.0 * m2 - h * h * h * eh

    b0 = m0
    b1 = h - b0
    b2 = h * h - 2.0 * b1
    b3 = h * h * h - 3.0 * b2

    if np.any(small):
        hs = h
        m1 = np.where(small, _moment_series(hs, 1, -1.0), m1)
        m2 = np.where(small, _moment_series(hs, 2, -1.0), m2)
        m3 = np.where(small, _moment_series(hs, 3, -1.0), m3)
        b1 = np.where(small, eh * _moment_series(hs, 1, 1.0), b1)
        b2 = np.where(small, eh * _moment_series(hs, 2, 1.0), b2)
        b3 = np.where(small, eh * _moment_series(hs, 3, 1.0), b3)
    return (m0, m1, m2, m3), (b0, b1, b2, b3)


# ---------------------------------------------------------------------------
# density reconstruction


def _segment_slopes(vals: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Second-order finite-difference slopes on one smooth segment."""
    n = vals.size
    if n == 1:
        return np.zeros(1)
    if n == 2:
        d = (vals[1] - vals[0]) / (xs[1] - xs[0])
        return np.array([d, d])
    return np.gradient(vals, xs, edge_order=2)


def _density_cells(x, values, slope_left, slope_right, peak):
    """Cubic coefficients of the density a = v^2 + v_x^2/2 on every cell."""
    a_left = values**2 + 0.5 * slope_left**2
    a_right = values**2 + 0.5 * slope_right**2
    # the density is smooth on each side of the peak; estimate its slope
    # segment-wise so the corner never enters a difference stencil
    d_neg = _segment_slopes(a_left[: peak + 1], x[: peak + 1])
    d_pos = _segment_slopes(a_right[peak:], x[peak:])
    gp = np.concatenate([a_left[:peak], a_right[peak:-1]])
    gq = np.concatenate([a_left[1 : peak + 1], a_right[peak + 1 :]])
    dp = np.concatenate([d_neg[:peak], d_pos[:-1]])
    dq = np.concatenate([d_neg[1 : peak + 1], d_pos[1:]])
    h = np.diff(x)
    return h, _hermite_powers(h, gp, gq, dp, dq)


def _sweeps_raw(x, values, slope_left, slope_right, peak):
    """Scaled one-sided integrals (Lt, Rt) of the density at every node.

    Lt[i] = e^{-x_i} int_{x_0}^{x_i} e^{y}  a(y) dy
    Rt[i] = e^{+x_i} int_{x_i}^{x_N} e^{-y} a(y) dy
    """
    if not np.all(np.diff(x) > 0):
        raise GridError("grid positions must be strictly increasing")
    if not (
        np.all(np.isfinite(x))
        and np.all(np.isfinite(values))
        and np.all(np.isfinite(slope_left))
        and np.all(np.isfinite(slope_right))
    ):
        raise InputDataError("non-finite field data in convolution sweep")

    h, (c0, c1, c2, c3) = _density_cells(x, values, slope_left, slope_right, peak)
    (m0, m1, m2, m3), (b0, b1, b2, b3) = _exp_cell_moments(h)
    # per-cell integrals against the two one-sided exponential weights
    k_cell = c0 * m0 + c1 * m1 + c2 * m2 + c3 * m3  # weight e^{-(y - x_k)}
    j_cell = c0 * b0 + c1 * b1 + c2 * b2 + c3 * b3  # weight e^{+(y - x_{k+1})}

    ex = np.exp(x)
    emx = np.exp(-x)
    lt = emx * np.concatenate([[0.0], np.cumsum(ex[1:] * j_cell)])
    rt = ex * np.concatenate(
        [np.cumsum((emx[:-1] * k_cell)[::-1])[::-1], [0.0]]
    )
    return lt, rt


def exp_sweep_accumulators(fld: PeakedField) -> ExpSweepAccumulators:
    """Unscaled one-sided exponential integrals of the field's density."""
    lt, rt = _sweeps_raw(
        fld.positions, fld.values, fld.slope_left, fld.slope_right, fld.peak_index
    )
    return ExpSweepAccumulators(left=lt * np.exp(fld.positions), right=rt * np.exp(-fld.positions))


def conv_QP(fld: PeakedField) -> tuple[np.ndarray, np.ndarray]:
    """Both nonlocal operators in one pair of sweeps: (Q[field], P[field])."""
    lt, rt = _sweeps_raw(
        fld.positions, fld.values, fld.slope_left, fld.slope_right, fld.peak_index
    )
    return 0.5 * (rt - lt), 0.5 * (rt + lt)


def conv_Q(fld: PeakedField) -> np.ndarray:
    """Q[field] = 1/2 phi' * (field^2 + field_x^2 / 2) at every node."""
    return conv_QP(fld)[0]


def conv_P(fld: PeakedField) -> np.ndarray:
    """P[field] = 1/2 phi * (field^2 + field_x^2 / 2) at every node."""
    return conv_QP(fld)[1]


def linear_conv_reduction(fld: PeakedField, x: float) -> float:
    """Closed-form value of phi' * (phi v + phi' v_x / 2) at a point.

    Equals -phi'(x) v(x) + phi'(x) v(0) - phi(x) int_0^x v(y) dy for any
    field in H1.
    """
    px = float(phi_prime(x))
    return (
        -px * value_at(fld, x)
        + px * fld.peak_value()
        - float(phi(x)) * integral_from_zero_at(fld, x)
    )
