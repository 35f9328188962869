"""Nonlinear evolution of peaked perturbations along characteristics.

The perturbation v rides on a peakon whose peak is pinned at x = 0 in the
co-moving frame; the peak shift a(t) absorbs the value of v at the peak.
Each characteristic carries the position X, value V, slope U and Jacobian
X_s; the limiting characteristic at the peak carries its own trace equations
for V0 and the two one-sided slopes U0-.  All nonlocal terms (w, Q, P) are
recomputed on the deformed grid at every Runge-Kutta stage.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import field as fld_mod
from .errors import ConfigurationError, GridError, IntegrationError, JumpGenerationError
from .field import FLOAT_FMT, PeakedField, _cell_integrals, graded_grid
from .kernel import _sweeps_raw

SLOPE_FLOOR = -50.0
JACOBIAN_FLOOR = 1e-6


@dataclass(frozen=True)
class InitialDataSpec:
    """Parameters of the sharply localized corner-exponential data family."""

    epsilon: float
    mu: float
    family: str = "corner-exponential"


@dataclass(frozen=True)
class BlowupReport:
    triggered: bool
    t_break: float | None
    mechanism: str | None  # "slope_unbounded" or "characteristic_compression"
    min_slope: float
    min_jacobian: float


@dataclass(frozen=True)
class NonlinearState:
    """One snapshot of the characteristic ensemble."""

    t: float
    a: float
    s_labels: np.ndarray
    X: np.ndarray
    V: np.ndarray
    U: np.ndarray
    Xs: np.ndarray
    V0: float
    U0_minus: float
    U0_plus: float

    @property
    def peak_index(self) -> int:
        return int(np.flatnonzero(self.s_labels == 0.0)[0])

    def perturbation_field(self) -> PeakedField:
        p = self.peak_index
        sl = self.U.copy()
        sr = self.U.copy()
        sl[p] = self.U0_minus
        sr[p] = self.U0_plus
        vals = self.V.copy()
        vals[p] = self.V0
        return PeakedField.create(
            self.X, vals, sl, sr, s_labels=self.s_labels, validate=False
        )

    def solution_field(self) -> PeakedField:
        """Reconstructed u = phi + v in peak-centered coordinates."""
        p = self.peak_index
        v = self.perturbation_field()
        ph = np.exp(-np.abs(self.X))
        php = -np.sign(self.X) * ph
        php_l = php.copy()
        php_r = php.copy()
        php_l[p] = 1.0
        php_r[p] = -1.0
        return PeakedField.create(
            self.X,
            ph + v.values,
            php_l + v.slope_left,
            php_r + v.slope_right,
            s_labels=self.s_labels,
            validate=False,
        )


@dataclass(frozen=True)
class RunRecord:
    t: float
    a: float
    E: float
    F: float
    h1_v: float
    sup_vx: float
    V0: float
    U0_minus: float
    U0_plus: float
    min_Xs: float
    lower_bound_eps2_et: float


RECORD_CSV_HEADER = [
    "t",
    "a",
    "E",
    "F",
    "h1_v",
    "sup_vx",
    "V0",
    "U0_minus",
    "U0_plus",
    "min_Xs",
    "lower_bound_eps2_et",
]


def records_to_csv(records: list[RunRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_CSV_HEADER)
        for r in records:
            writer.writerow([FLOAT_FMT % getattr(r, name) for name in RECORD_CSV_HEADER])


def threshold_time(epsilon: float) -> float:
    """Guaranteed instability horizon tau = log 2 - 2 log(epsilon)."""
    return math.log(2.0) - 2.0 * math.log(epsilon)


# ---------------------------------------------------------------------------
# initial data


def build_initial_data(spec: InitialDataSpec, grid) -> PeakedField:
    """Corner-exponential data v0(x) = -2 eps^2 x exp(-|x|/mu).

    Satisfies v0(0) = 0, v0'(0) = -2 eps^2 = -sup|v0'| and
    ||v0||_{H1}^2 = 2 eps^4 mu (1 + mu^2).
    """
    if not 0.0 < spec.epsilon <= 0.5:
        raise ConfigurationError("epsilon must lie in (0, 0.5]")
    if not 0.0 < spec.mu <= 1.0:
        raise ConfigurationError("mu must lie in (0, 1]")
    grid = np.asarray(grid, dtype=float)
    peak = np.flatnonzero(grid == 0.0)
    if peak.size != 1:
        raise GridError("grid must contain 0 exactly once")
    p = int(peak[0])
    h_peak = max(grid[p + 1] - grid[p], grid[p] - grid[p - 1]) if 0 < p < grid.size - 1 else np.inf
    if h_peak > spec.mu / 10.0 * (1.0 + 1e-9):
        raise ConfigurationError(
            f"grid spacing {h_peak:g} at the peak does not resolve mu={spec.mu:g} "
            "(need h <= mu/10)"
        )
    c = -2.0 * spec.epsilon**2
    mu = spec.mu
    vals = c * grid * np.exp(-np.abs(grid) / mu)
    slopes = c * (1.0 - np.abs(grid) / mu) * np.exp(-np.abs(grid) / mu)
    return PeakedField.create(grid, vals, slopes, slopes.copy())


# ---------------------------------------------------------------------------
# right-hand side of the coupled characteristic system


def _rhs(y: np.ndarray, n: int, p: int) -> np.ndarray:
    X = y[:n]
    V = y[n : 2 * n]
    U = y[2 * n : 3 * n]
    Xs = y[3 * n : 4 * n]
    V0 = y[4 * n + 1]
    U0m = y[4 * n + 2]
    U0p = y[4 * n + 3]

    sl = U.copy()
    sl[p] = U0m  # U carries the right-sided peak value by convention

    cells = _cell_integrals(X, V, sl, U)
    w = np.concatenate([[0.0], np.cumsum(cells)])
    w -= w[p]

    lt, rt = _sweeps_raw(X, V, sl, U, p)
    Q = 0.5 * (rt - lt)
    P = 0.5 * (rt + lt)

    ph = np.exp(-np.abs(X))
    php = -np.sign(X) * ph

    dy = np.empty_like(y)
    dX = dy[:n]
    dV = dy[n : 2 * n]
    dU = dy[2 * n : 3 * n]
    dXs = dy[3 * n : 4 * n]

    np.subtract(ph, 1.0, out=dX)
    dX += V
    dX -= V0
    dX[p] = 0.0

    np.multiply(ph, w, out=dV)
    dV -= Q
    dV[p] = -Q[p]

    # slope equation along characteristics
    np.multiply(php, w - U, out=dU)
    dU += ph * V
    dU += V * V - 0.5 * U * U
    dU -= P
    dU0m = -U0m + V0 - 0.5 * U0m * U0m + V0 * V0 - P[p]
    dU0p = U0p + V0 - 0.5 * U0p * U0p + V0 * V0 - P[p]
    dU[p] = dU0p

    np.multiply(php + U, Xs, out=dXs)
    dXs[p] = (-1.0 + U0p) * Xs[p]  # right-sided convention at the peak

    dy[4 * n] = V0  # da/dt
    dy[4 * n + 1] = -Q[p]  # dV0/dt
    dy[4 * n + 2] = dU0m
    dy[4 * n + 3] = dU0p
    return dy


def rhs(state: NonlinearState) -> dict[str, np.ndarray | float]:
    """Time derivatives of all state components, by name."""
    n = state.X.size
    p = state.peak_index
    y = _pack(state)
    dy = _rhs(y, n, p)
    return {
        "X": dy[:n],
        "V": dy[n : 2 * n],
        "U": dy[2 * n : 3 * n],
        "Xs": dy[3 * n : 4 * n],
        "a": float(dy[4 * n]),
        "V0": float(dy[4 * n + 1]),
        "U0_minus": float(dy[4 * n + 2]),
        "U0_plus": float(dy[4 * n + 3]),
    }


def _pack(state: NonlinearState) -> np.ndarray:
    n = state.X.size
    y = np.empty(4 * n + 4)
    y[:n] = state.X
    y[n : 2 * n] = state.V
    y[2 * n : 3 * n] = state.U
    y[3 * n : 4 * n] = state.Xs
    y[4 * n] = state.a
    y[4 * n + 1] = state.V0
    y[4 * n + 2] = state.U0_minus
    y[4 * n + 3] = state.U0_plus
    p = state.peak_index
    y[n + p] = state.V0
    y[2 * n + p] = state.U0_plus
    return y


def _unpack(t: float, y: np.ndarray, s_labels: np.ndarray, n: int) -> NonlinearState:
    return NonlinearState(
        t=t,
        a=float(y[4 * n]),
        s_labels=s_labels,
        X=y[:n].copy(),
        V=y[n : 2 * n].copy(),
        U=y[2 * n : 3 * n].copy(),
        Xs=y[3 * n : 4 * n].copy(),
        V0=float(y[4 * n + 1]),
        U0_minus=float(y[4 * n + 2]),
        U0_plus=float(y[4 * n + 3]),
    )


# ---------------------------------------------------------------------------
# time integration


def _make_record(
    state: NonlinearState, trace_bound_epsilon: float | None
) -> RunRecord:
    v = state.perturbation_field()
    u = state.solution_field()
    sup_vx = max(
        float(np.max(np.abs(v.slope_left))), float(np.max(np.abs(v.slope_right)))
    )
    bound = (
        trace_bound_epsilon**2 * math.exp(state.t)
        if trace_bound_epsilon is not None
        else math.nan
    )
    return RunRecord(
        t=state.t,
        a=state.a,
        E=fld_mod.energy_E(u),
        F=fld_mod.momentum_F(u),
        h1_v=math.sqrt(fld_mod.h1_norm_sq(v, "both")),
        sup_vx=sup_vx,
        V0=state.V0,
        U0_minus=state.U0_minus,
        U0_plus=state.U0_plus,
        min_Xs=float(np.min(state.Xs)),
        lower_bound_eps2_et=bound,
    )


def integrate(
    v0: PeakedField,
    t_end: float,
    dt: float,
    *,
    slope_floor: float = SLOPE_FLOOR,
    jacobian_floor: float = JACOBIAN_FLOOR,
    stop_when_sup_slope_exceeds: float | None = None,
    trace_bound_epsilon: float | None = None,
    keep_states_every: int = 0,
) -> tuple[list[NonlinearState], BlowupReport, list[RunRecord]]:
    """Fixed-step RK4 integration of the peaked-perturbation system.

    Halts early with a breakdown report when the minimum slope reaches
    ``slope_floor`` (wave breaking) or the minimum Jacobian reaches
    ``jacobian_floor`` (characteristic compression).  ``keep_states_every``
    controls how many intermediate snapshots are retained (0 keeps only the
    first and last).
    """
    if abs(v0.peak_value()) > 1e-12:
        raise JumpGenerationError(
            "nonlinear peaked-perturbation data must vanish at the peak; the "
            "peak shift a(t) absorbs the value there"
        )
    if dt <= 0:
        raise ValueError("dt must be positive")

    n = v0.n_nodes
    p = v0.peak_index
    s_labels = v0.s_labels

    y = np.empty(4 * n + 4)
    y[:n] = v0.positions
    y[n : 2 * n] = v0.values
    y[2 * n : 3 * n] = v0.slope_right
    y[3 * n : 4 * n] = 1.0
    y[4 * n] = 0.0
    y[4 * n + 1] = v0.values[p]
    y[4 * n + 2] = v0.slope_left[p]
    y[4 * n + 3] = v0.slope_right[p]

    n_steps = max(1, int(round(t_end / dt)))
    h = t_end / n_steps

    states: list[NonlinearState] = [_unpack(0.0, y, s_labels, n)]
    records: list[RunRecord] = [_make_record(states[0], trace_bound_epsilon)]
    report = BlowupReport(
        triggered=False,
        t_break=None,
        mechanism=None,
        min_slope=float(min(np.min(y[2 * n : 3 * n]), y[4 * n + 2])),
        min_jacobian=1.0,
    )

    t = 0.0
    for step in range(1, n_steps + 1):
        try:
            k1 = _rhs(y, n, p)
            k2 = _rhs(y + 0.5 * h * k1, n, p)
            k3 = _rhs(y + 0.5 * h * k2, n, p)
            k4 = _rhs(y + h * k3, n, p)
        except GridError:
            report = BlowupReport(
                triggered=True,
                t_break=t,
                mechanism="characteristic_compression",
                min_slope=float(min(np.min(y[2 * n : 3 * n]), y[4 * n + 2])),
                min_jacobian=float(np.min(y[3 * n : 4 * n])),
            )
            break
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = step * h

        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t={t:.6g}")

        X = y[:n]
        Xs = y[3 * n : 4 * n]
        min_slope = float(min(np.min(y[2 * n : 3 * n]), y[4 * n + 2]))
        min_xs = float(np.min(Xs))
        state = _unpack(t, y, s_labels, n)
        records.append(_make_record(state, trace_bound_epsilon))
        if keep_states_every and step % keep_states_every == 0:
            states.append(state)

        if min_slope <= slope_floor:
            report = BlowupReport(True, t, "slope_unbounded", min_slope, min_xs)
            if not states or states[-1].t != t:
                states.append(state)
            break
        if min_xs <= jacobian_floor or not np.all(np.diff(X) > 0):
            report = BlowupReport(
                True, t, "characteristic_compression", min_slope, min_xs
            )
            if not states or states[-1].t != t:
                states.append(state)
            break
        if (
            stop_when_sup_slope_exceeds is not None
            and records[-1].sup_vx > stop_when_sup_slope_exceeds
        ):
            if not states or states[-1].t != t:
                states.append(state)
            break
    else:
        if not states or states[-1].t != t:
            states.append(_unpack(t, y, s_labels, n))

    if not report.triggered:
        report = BlowupReport(
            triggered=False,
            t_break=None,
            mechanism=None,
            min_slope=float(min(np.min(y[2 * n : 3 * n]), y[4 * n + 2])),
            min_jacobian=float(np.min(y[3 * n : 4 * n])),
        )
    return states, report, records


def orbital_stability_monitor(state: NonlinearState) -> float:
    """H1 distance between u and the peakon translate pinned at the peak.

    In peak-centered coordinates this is exactly the H1 norm of the
    perturbation; the function exists so runs can log the orbital-stability
    quantity explicitly.
    """
    v = state.perturbation_field()
    return math.sqrt(fld_mod.h1_norm_sq(v, "both"))


def instability_experiment(
    epsilon: float,
    mu: float,
    t_max: float,
    dt: float,
    *,
    half_width: float = 30.0,
    n_nodes: int = 8001,
) -> tuple[float | None, list[RunRecord], BlowupReport]:
    """Drive the corner-exponential data until sup|v_x| exceeds 1.

    Returns the first time t0 with sup|v_x| > 1, or None when wave breaking
    is detected first (the breakdown itself witnesses the instability).
    """
    grid = graded_grid(half_width, n_nodes, mu / 10.0)
    v0 = build_initial_data(InitialDataSpec(epsilon=epsilon, mu=mu), grid)
    _, report, records = integrate(
        v0,
        t_max,
        dt,
        stop_when_sup_slope_exceeds=1.0,
        trace_bound_epsilon=epsilon,
    )
    t0 = next((r.t for r in records if r.sup_vx > 1.0), None)
    return t0, records, report
