"""Self-check suite of closed-form identities.

Each check compares an independent computation path against a closed form and
returns a (name, passed, detail) row; the CLI's ``verify`` scenario runs all
of them and exits nonzero when any fails.
"""

from __future__ import annotations

import numpy as np

from .field import PeakedField, sample, uniform_grid
from .kernel import conv_P, linear_conv_reduction
from .linear import linear_ode_reference, solve_linear
from .multipeakon import MultipeakonState, mp_integrate
from .oracles import lin_conv_lhs_quadrature

CheckRow = tuple[str, bool, str]


def _peakon_field(half_width: float = 20.0, n_nodes: int = 8001) -> PeakedField:
    grid = uniform_grid(half_width, n_nodes)
    vals = np.exp(-np.abs(grid))
    sl = -np.sign(grid) * vals
    sr = sl.copy()
    p = n_nodes // 2
    sl[p], sr[p] = 1.0, -1.0
    return PeakedField.create(grid, vals, sl, sr)


def check_peakon_identity(tol: float = 1e-8) -> CheckRow:
    """sup-node residual of -phi + phi^2/2 + P[phi], which vanishes exactly."""
    fld = _peakon_field()
    ph = fld.values
    resid = -ph + 0.5 * ph**2 + conv_P(fld)
    err = float(np.max(np.abs(resid)))
    return ("peakon_identity", bool(err <= tol), f"sup residual {err:.3e} (tol {tol:g})")


def check_linear_convolution_identity(tol: float = 1e-6) -> CheckRow:
    """Quadrature of phi' * (phi v + phi' v_x / 2) vs its closed reduction."""
    gauss = lambda y: y * np.exp(-(y**2))
    gauss_x = lambda y: (1.0 - 2.0 * y * y) * np.exp(-(y**2))
    grid = uniform_grid(20.0, 8001)
    cases = [
        (_peakon_field(), lambda y: np.exp(-np.abs(y)), lambda y: -np.sign(y) * np.exp(-np.abs(y))),
        (sample(gauss, gauss_x, gauss_x, grid), gauss, gauss_x),
    ]
    xs = np.linspace(-6.0, 6.0, 20)
    worst = 0.0
    for fld, v, vx in cases:
        for x in xs:
            lhs = lin_conv_lhs_quadrature(v, vx, float(x))
            rhs = linear_conv_reduction(fld, float(x))
            worst = max(worst, abs(lhs - rhs))
    return (
        "linear_convolution_identity",
        bool(worst <= tol),
        f"sup error {worst:.3e} over 20 points x 2 profiles (tol {tol:g})",
    )


def check_linear_closed_form(tol: float = 1e-6) -> CheckRow:
    """Closed-form linearized solution vs a direct RK4 reference at t = 3."""
    grid = uniform_grid(20.0, 4001)
    v = lambda y: y * np.exp(-(y**2))
    vx = lambda y: (1.0 - 2.0 * y * y) * np.exp(-(y**2))
    v0 = sample(v, vx, vx, grid)
    t = 3.0
    closed = solve_linear(v0, t)
    ref = linear_ode_reference(v0, t, 1e-3)
    err = max(
        float(np.max(np.abs(closed.X - ref.X))),
        float(np.max(np.abs(closed.V - ref.V))),
        float(np.max(np.abs(closed.U_left - ref.U_left))),
        float(np.max(np.abs(closed.U_right - ref.U_right))),
        float(np.max(np.abs(closed.W - ref.W))),
    )
    return ("linear_closed_form", bool(err <= tol), f"max error {err:.3e} (tol {tol:g})")


def check_single_peakon_speed(tol: float = 1e-8) -> CheckRow:
    """A lone peakon of amplitude c travels at constant speed c."""
    c, t_end = 0.75, 10.0
    states = mp_integrate(MultipeakonState.create([0.0], [c]), t_end, 1e-2)
    final = states[-1]
    err = max(abs(final.x[0] - c * t_end), abs(final.m[0] - c))
    return (
        "single_peakon_speed",
        bool(err <= tol),
        f"position/amplitude error {err:.3e} (tol {tol:g})",
    )


ALL_CHECKS = (
    check_peakon_identity,
    check_linear_convolution_identity,
    check_linear_closed_form,
    check_single_peakon_speed,
)


def run_all() -> list[CheckRow]:
    return [check() for check in ALL_CHECKS]
