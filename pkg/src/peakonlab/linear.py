"""Exact solution of the linearized-at-peakon Cauchy problem.

The linearization around the unit-speed peakon reduces, in the frame moving
with the peak, to a transport problem whose characteristics are known in
closed form.  This module evaluates those closed forms (positions X,
antiderivative W, values V, slopes U), the linearized operator A, the H1
growth identities, and a Runge-Kutta reference integrator used purely as an
independent cross-check of the closed forms.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, JumpGenerationError
from .field import FLOAT_FMT, PeakedField, Side, cumulative_from_zero, h1_norm_sq
from .kernel import phi, phi_prime

PEAK_VALUE_TOL = 1e-12


@dataclass(frozen=True)
class LinearState:
    """Closed-form solution surfaces on the label grid at one time."""

    t: float
    s_labels: np.ndarray
    X: np.ndarray
    W: np.ndarray
    V: np.ndarray
    U_left: np.ndarray
    U_right: np.ndarray
    alpha: float

    def to_field(self) -> PeakedField:
        """Solution as a field on the deformed grid of positions X."""
        return PeakedField.create(
            self.X, self.V, self.U_left, self.U_right, s_labels=self.s_labels,
            validate=False,
        )


# ---------------------------------------------------------------------------
# closed-form characteristics


def _xpos(t: float, s: np.ndarray) -> np.ndarray:
    """X(t,s) = log[1 + (e^s - 1) e^{-t}] for s > 0, overflow-safe."""
    s = np.asarray(s, dtype=float)
    d = s - t
    out = np.empty_like(s)
    m = d >= 0.0
    # s >= t: factor out e^{s-t}
    out[m] = d[m] + np.log(np.exp(-d[m]) - np.exp(-s[m]) + 1.0)
    # s < t: both exponentials below 1
    out[~m] = np.log1p(np.exp(d[~m]) - np.exp(-t))
    return out


def char_X(t: float, s):
    """Characteristic position for the flow dX/dt = phi(X) - 1, X(0) = s."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros_like(s_arr)
    pos = s_arr > 0
    neg = s_arr < 0
    if np.any(pos):
        out[pos] = _xpos(t, s_arr[pos])
    if np.any(neg):
        out[neg] = -_xpos(-t, -s_arr[neg])
    return out if np.ndim(s) else float(out[0])


def _xs_pos(t: float, s: np.ndarray) -> np.ndarray:
    """X_s(t,s) = 1 / [1 + (e^t - 1) e^{-s}] for s > 0, overflow-safe."""
    s = np.asarray(s, dtype=float)
    log_denom = np.logaddexp(np.log1p(-np.exp(-s)), t - s)
    return np.exp(-log_denom)


def jacobian_Xs(t: float, s):
    """Jacobian dX/ds of the characteristic map; positive for all s != 0."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr == 0.0):
        raise ValueError("jacobian_Xs is two-valued at s=0; use jacobian_Xs_peak_limits")
    out = np.empty_like(s_arr)
    pos = s_arr > 0
    out[pos] = _xs_pos(t, s_arr[pos])
    out[~pos] = _xs_pos(-t, -s_arr[~pos])
    return out if np.ndim(s) else float(out[0])


def jacobian_Xs_peak_limits(t: float) -> tuple[float, float]:
    """One-sided limits of X_s at the peak: (s -> 0-, s -> 0+) = (e^t, e^-t)."""
    return float(np.exp(t)), float(np.exp(-t))


def _y_factor(t: float, s: np.ndarray) -> np.ndarray:
    """Growth kernel Y(t,s) of the closed-form value surface; Y(t,0) = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    neg = s < 0
    out[pos] = 1.0 - _xs_pos(t, s[pos])
    out[neg] = _xs_pos(-t, -s[neg]) - 1.0
    return out


# ---------------------------------------------------------------------------
# closed-form solver


def _require_zero_peak_value(v0: PeakedField) -> None:
    if abs(v0.peak_value()) > PEAK_VALUE_TOL:
        raise JumpGenerationError(
            "initial data with nonzero value at the peak instantly generates a "
            "jump discontinuity there; the solver requires v0(0) = 0"
        )


def solve_linear(v0: PeakedField, t: float) -> LinearState:
    """Evaluate the closed-form linearized solution at time t."""
    _require_zero_peak_value(v0)
    s = v0.s_labels
    p = v0.peak_index
    w0 = cumulative_from_zero(v0)

    X = char_X(t, s)
    Y = _y_factor(t, s)
    inv_xs = np.ones_like(s)
    pos = s > 0
    neg = s < 0
    inv_xs[pos] = 1.0 / _xs_pos(t, s[pos])
    inv_xs[neg] = 1.0 / _xs_pos(-t, -s[neg])
    xs = 1.0 / inv_xs

    W = w0 * xs
    V = v0.values + w0 * Y
    sgn = np.sign(s)  # -w0*Y on the right half, +w0*Y on the left half
    U_left = (v0.slope_left + v0.values * Y) * inv_xs - sgn * w0 * Y
    U_right = (v0.slope_right + v0.values * Y) * inv_xs - sgn * w0 * Y

    # exact one-sided values on the limiting characteristic
    X[p] = 0.0
    W[p] = 0.0
    V[p] = 0.0
    U_left[p] = v0.slope_left[p] * np.exp(-t)
    U_right[p] = v0.slope_right[p] * np.exp(t)

    return LinearState(
        t=float(t),
        s_labels=s,
        X=X,
        W=W,
        V=V,
        U_left=U_left,
        U_right=U_right,
        alpha=float(v0.slope_right[p]),
    )


# ---------------------------------------------------------------------------
# H1 growth identities


def _halfline_weighted_integral(v0: PeakedField, side: Side) -> float:
    """int over the half-line of phi(s) (v0^2 + v0'^2 / 2), trapezoid."""
    s = v0.s_labels
    h = np.diff(s)
    w = np.exp(-np.abs(s))
    f_lo = w[:-1] * (v0.values[:-1] ** 2 + 0.5 * v0.slope_right[:-1] ** 2)
    f_hi = w[1:] * (v0.values[1:] ** 2 + 0.5 * v0.slope_left[1:] ** 2)
    cells = 0.5 * h * (f_lo + f_hi)
    p = v0.peak_index
    return float(np.sum(cells[p:] if side == "positive" else cells[:p]))


def h1_identity_rhs(v0: PeakedField, t: float, side: Side) -> float:
    """Right-hand side of the exact H1 growth identity on a half-line."""
    _require_zero_peak_value(v0)
    if side == "positive":
        factor = 2.0 * np.expm1(t)
    elif side == "negative":
        factor = 2.0 * np.expm1(-t)
    else:
        raise ValueError("side must be 'positive' or 'negative'")
    return h1_norm_sq(v0, side) + factor * _halfline_weighted_integral(v0, side)


def measured_h1_sq(state: LinearState, side: Side) -> float:
    """Squared H1 norm of the solved surfaces by quadrature in label space.

    Integrates (V^2 + U^2) X_s ds over the requested half-line, which equals
    the x-space H1 integral after the change of variables x = X(t,s).
    """
    s = state.s_labels
    p = np.flatnonzero(s == 0.0)[0]
    t = state.t
    xs_l, xs_r = jacobian_Xs_peak_limits(t)
    if side == "positive":
        ss, V, U = s[p:], state.V[p:], state.U_right[p:].copy()
        xs = np.empty_like(ss)
        xs[0] = xs_r
        xs[1:] = jacobian_Xs(t, ss[1:])
        U[1:] = state.U_left[p + 1 :]  # off-peak slopes are single-valued
        U[0] = state.U_right[p]
    elif side == "negative":
        ss, V = s[: p + 1], state.V[: p + 1]
        U = state.U_left[: p + 1].copy()
        xs = np.empty_like(ss)
        xs[-1] = xs_l
        xs[:-1] = jacobian_Xs(t, ss[:-1])
    else:
        raise ValueError("side must be 'positive' or 'negative'")
    integrand = (V**2 + U**2) * xs
    return float(np.trapezoid(integrand, ss))


# ---------------------------------------------------------------------------
# linearized operator


def apply_A(v: PeakedField) -> tuple[np.ndarray, np.ndarray]:
    """Linearized operator (Av)(x), returned with two one-sided peak values.

    Away from the peak, Av = (1 - phi) v' + phi int_0^x v - v(0) phi'.  At the
    peak the two one-sided limits are -v(0) and +v(0); they coincide exactly
    when v(0) = 0.
    """
    x = v.positions
    p = v.peak_index
    w = cumulative_from_zero(v)
    v_peak = v.peak_value()
    ph = phi(x)
    php_left = np.asarray(phi_prime(x)).copy()
    php_right = php_left.copy()
    php_left[p] = 1.0  # limit of phi' from x -> 0-
    php_right[p] = -1.0  # limit of phi' from x -> 0+
    av_left = (1.0 - ph) * v.slope_left + ph * w - v_peak * php_left
    av_right = (1.0 - ph) * v.slope_right + ph * w - v_peak * php_right
    return av_left, av_right


# ---------------------------------------------------------------------------
# independent ODE reference


def linear_ode_reference(v0: PeakedField, t_end: float, dt: float) -> LinearState:
    """RK4 integration of the characteristic ODE system, per label.

    Serves as the independent oracle for the closed forms in
    :func:`solve_linear`; it never touches them.
    """
    _require_zero_peak_value(v0)
    if dt <= 0:
        raise ValueError("dt must be positive")
    s = v0.s_labels
    p = v0.peak_index
    sgn = np.sign(s)

    X = s.copy()
    W = cumulative_from_zero(v0)
    V = v0.values.copy()
    U = v0.slope_right.copy()
    u0l = float(v0.slope_left[p])
    u0r = float(v0.slope_right[p])

    def rhs(state):
        X, W, V, U, u0l, u0r = state
        ph = np.exp(-np.abs(X))
        php = -sgn * ph  # characteristics never cross the peak
        dX = ph - 1.0
        dW = php * W
        dV = ph * W
        dU = php * (W - U) + ph * V
        dX[p] = dW[p] = dV[p] = dU[p] = 0.0
        return dX, dW, dV, dU, -u0l, u0r

    n_steps = max(1, int(round(t_end / dt)))
    h = t_end / n_steps
    state = (X, W, V, U, u0l, u0r)
    for _ in range(n_steps):
        k1 = rhs(state)
        k2 = rhs(tuple(y + 0.5 * h * k for y, k in zip(state, k1)))
        k3 = rhs(tuple(y + 0.5 * h * k for y, k in zip(state, k2)))
        k4 = rhs(tuple(y + h * k for y, k in zip(state, k3)))
        state = tuple(
            y + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            for y, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
        if not np.all(np.isfinite(state[0])):
            raise IntegrationError("reference integration produced non-finite values")

    X, W, V, U, u0l, u0r = state
    U_left = U.copy()
    U_right = U.copy()
    U_left[p] = u0l
    U_right[p] = u0r
    return LinearState(
        t=float(t_end),
        s_labels=s,
        X=X,
        W=W,
        V=V,
        U_left=U_left,
        U_right=U_right,
        alpha=float(v0.slope_right[p]),
    )


# ---------------------------------------------------------------------------
# serialization

LINEAR_CSV_HEADER = ["t", "s_label", "X", "V", "U_left", "U_right", "W"]


def to_csv(state: LinearState, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LINEAR_CSV_HEADER)
        for i in range(state.s_labels.size):
            writer.writerow(
                [
                    FLOAT_FMT % state.t,
                    FLOAT_FMT % state.s_labels[i],
                    FLOAT_FMT % state.X[i],
                    FLOAT_FMT % state.V[i],
                    FLOAT_FMT % state.U_left[i],
                    FLOAT_FMT % state.U_right[i],
                    FLOAT_FMT % state.W[i],
                ]
            )
