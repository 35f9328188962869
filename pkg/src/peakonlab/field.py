"""Continuous piecewise-C1 fields with a single interior corner.

A :class:`PeakedField` stores a function on a strictly increasing grid that
contains the point 0 (the peak node).  The function value is single-valued
everywhere; the first derivative is stored as two one-sided values per node
and the two may differ only at the peak node.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import ExtrapolationError, GridError, InputDataError

Side = Literal["negative", "positive", "both"]

FLOAT_FMT = "%.17g"


def _as_array(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=float))


@dataclass(frozen=True)
class PeakedField:
    """Sampled function with one-sided slopes and a single peak at x=0."""

    positions: np.ndarray
    values: np.ndarray
    slope_left: np.ndarray
    slope_right: np.ndarray
    s_labels: np.ndarray
    peak_index: int

    @classmethod
    def create(
        cls,
        positions,
        values,
        slope_left,
        slope_right,
        s_labels=None,
        validate: bool = True,
    ) -> "PeakedField":
        positions = _as_array(positions)
        values = _as_array(values)
        slope_left = _as_array(slope_left)
        slope_right = _as_array(slope_right)
        s_labels = positions if s_labels is None else _as_array(s_labels)
        peak = np.flatnonzero(positions == 0.0)
        if peak.size != 1:
            raise GridError("grid must contain exactly one node with position 0")
        f = cls(positions, values, slope_left, slope_right, s_labels, int(peak[0]))
        if validate:
            f._validate()
        return f

    def _validate(self) -> None:
        n = self.positions.size
        if n < 2:
            raise GridError("need at least two nodes")
        for arr, name in (
            (self.values, "values"),
            (self.slope_left, "slope_left"),
            (self.slope_right, "slope_right"),
            (self.s_labels, "s_labels"),
        ):
            if arr.shape != self.positions.shape:
                raise GridError(f"{name} has shape {arr.shape}, expected {self.positions.shape}")
        if not np.all(np.diff(self.positions) > 0):
            raise GridError("positions must be strictly increasing")
        if not np.all(np.diff(self.s_labels) > 0):
            raise GridError("s_labels must be strictly increasing")
        for arr in (self.positions, self.values, self.slope_left, self.slope_right):
            if not np.all(np.isfinite(arr)):
                raise InputDataError("non-finite entries in field data")
        offpeak = np.arange(n) != self.peak_index
        if np.any(self.slope_left[offpeak] != self.slope_right[offpeak]):
            raise GridError("one-sided slopes may differ only at the peak node")

    @property
    def n_nodes(self) -> int:
        return self.positions.size

    def peak_value(self) -> float:
        return float(self.values[self.peak_index])


def sample(
    f: Callable[[np.ndarray], np.ndarray],
    f_prime_left: Callable[[np.ndarray], np.ndarray],
    f_prime_right: Callable[[np.ndarray], np.ndarray],
    grid,
) -> PeakedField:
    """Sample callables onto a grid that must contain 0."""
    grid = _as_array(grid)
    vals = np.asarray(f(grid), dtype=float)
    sl = np.asarray(f_prime_left(grid), dtype=float)
    sr = np.asarray(f_prime_right(grid), dtype=float)
    # one-sided slopes are only allowed to disagree at the peak
    peak = np.flatnonzero(grid == 0.0)
    if peak.size != 1:
        raise GridError("sampling grid must contain 0 exactly once")
    p = int(peak[0])
    mask = np.arange(grid.size) != p
    sl = sl.copy()
    sl[mask] = sr[mask]
    return PeakedField.create(grid, vals, sl, sr)


def scale(fld: PeakedField, c: float) -> PeakedField:
    """Pointwise scaling by a constant."""
    return PeakedField.create(
        fld.positions,
        c * fld.values,
        c * fld.slope_left,
        c * fld.slope_right,
        s_labels=fld.s_labels,
        validate=False,
    )


# ---------------------------------------------------------------------------
# grids


def uniform_grid(half_width: float, n_nodes: int) -> np.ndarray:
    """Symmetric uniform grid on [-L, L] with an odd node count (node at 0)."""
    if n_nodes % 2 == 0:
        raise GridError("node count must be odd so a node sits at 0")
    g = np.linspace(-half_width, half_width, n_nodes)
    g[n_nodes // 2] = 0.0
    return g


def graded_grid(half_width: float, n_nodes: int, h_min: float) -> np.ndarray:
    """Symmetric grid with geometric spacing growth away from the peak.

    Spacing starts at ``h_min`` next to 0 and grows by a constant ratio so
    that each half covers ``half_width``.
    """
    if n_nodes % 2 == 0:
        raise GridError("node count must be odd so a node sits at 0")
    if h_min <= 0:
        raise GridError("h_min must be positive")
    n_cells = (n_nodes - 1) // 2
    if h_min * n_cells > half_width:
        raise GridError("h_min too large for the requested node count")
    if h_min * n_cells == half_width:
        return uniform_grid(half_width, n_nodes)

    def total(r: float) -> float:
        if n_cells * np.log(r) > 500.0:  # geometric sum would overflow
            return np.inf
        return h_min * (r**n_cells - 1.0) / (r - 1.0) - half_width

    from scipy.optimize import brentq

    lo, hi = 1.0 + 1e-14, 2.0
    while total(hi) < 0:
        hi *= 2.0
    ratio = brentq(total, lo, hi, xtol=1e-15, rtol=1e-15)
    steps = h_min * ratio ** np.arange(n_cells)
    pos = np.cumsum(steps)
    pos[-1] = half_width
    return np.concatenate([-pos[::-1], [0.0], pos])


# ---------------------------------------------------------------------------
# quadrature over cells

def _cell_integrals(positions, values, slope_left, slope_right) -> np.ndarray:
    """Per-cell integral of the field, trapezoid plus one-sided slope correction.

    The correction term makes each cell integral exact for the cubic Hermite
    interpolant; for merely piecewise-C1 data it degrades gracefully to the
    trapezoid value.
    """
    h = np.diff(positions)
    trap = 0.5 * h * (values[:-1] + values[1:])
    corr = h * h * (slope_right[:-1] - slope_left[1:]) / 12.0
    return trap + corr


def cumulative_from_zero(fld: PeakedField) -> np.ndarray:
    """Antiderivative w(x) = integral of the field from 0 to x, at every node."""
    cells = _cell_integrals(fld.positions, fld.values, fld.slope_left, fld.slope_right)
    acc = np.concatenate([[0.0], np.cumsum(cells)])
    return acc - acc[fld.peak_index]


def _h1_cells(positions, values, slope_left, slope_right) -> np.ndarray:
    """Per-cell trapezoid of v^2 + v_x^2 using one-sided slopes in each cell."""
    h = np.diff(positions)
    f_lo = values[:-1] ** 2 + slope_right[:-1] ** 2
    f_hi = values[1:] ** 2 + slope_left[1:] ** 2
    return 0.5 * h * (f_lo + f_hi)


def h1_norm_sq_arrays(positions, values, slope_left, slope_right) -> float:
    """Squared H1 norm of raw sampled data over the full grid."""
    return float(np.sum(_h1_cells(positions, values, slope_left, slope_right)))


def h1_norm_sq(fld: PeakedField, side: Side = "both") -> float:
    """Squared H1 norm over a half-line or the whole grid."""
    cells = _h1_cells(fld.positions, fld.values, fld.slope_left, fld.slope_right)
    p = fld.peak_index
    if side == "negative":
        return float(np.sum(cells[:p]))
    if side == "positive":
        return float(np.sum(cells[p:]))
    if side == "both":
        return float(np.sum(cells))
    raise ValueError(f"unknown side {side!r}")


def energy_E(fld: PeakedField) -> float:
    """Conserved energy E(u) = integral of u^2 + u_x^2."""
    return h1_norm_sq(fld, "both")


def momentum_F(fld: PeakedField) -> float:
    """Conserved quantity F(u) = integral of u (u^2 + u_x^2)."""
    v = fld.values
    h = np.diff(fld.positions)
    f_lo = v[:-1] * (v[:-1] ** 2 + fld.slope_right[:-1] ** 2)
    f_hi = v[1:] * (v[1:] ** 2 + fld.slope_left[1:] ** 2)
    return float(np.sum(0.5 * h * (f_lo + f_hi)))


def sup_norms(fld: PeakedField) -> tuple[float, float]:
    """(sup |v|, sup |v_x|) over the stored node data."""
    sup_v = float(np.max(np.abs(fld.values)))
    sup_vx = float(
        max(np.max(np.abs(fld.slope_left)), np.max(np.abs(fld.slope_right)))
    )
    return sup_v, sup_vx


def derivative_jump_at_peak(fld: PeakedField) -> float:
    """Jump of the derivative across the peak: right slope minus left slope."""
    p = fld.peak_index
    return float(fld.slope_right[p] - fld.slope_left[p])


# ---------------------------------------------------------------------------
# pointwise evaluation between nodes (cubic Hermite)


def _hermite_powers(h, f0, f1, d0, d1):
    """Power-basis coefficients of the Hermite cubic on [0, h]."""
    c0 = f0
    c1 = d0
    c2 = (3.0 * (f1 - f0) / h - 2.0 * d0 - d1) / h
    c3 = (2.0 * (f0 - f1) / h + d0 + d1) / (h * h)
    return c0, c1, c2, c3


def _locate_cell(fld: PeakedField, x: float) -> int:
    pos = fld.positions
    if x < pos[0] or x > pos[-1]:
        raise ExtrapolationError(f"x={x:g} outside grid support [{pos[0]:g}, {pos[-1]:g}]")
    k = int(np.searchsorted(pos, x, side="right") - 1)
    return min(k, pos.size - 2)


def value_at(fld: PeakedField, x: float) -> float:
    """Field value at an arbitrary point, cubic Hermite within cells."""
    pos = fld.positions
    k = _locate_cell(fld, x)
    if x == pos[k]:
        return float(fld.values[k])
    h = pos[k + 1] - pos[k]
    c0, c1, c2, c3 = _hermite_powers(
        h, fld.values[k], fld.values[k + 1], fld.slope_right[k], fld.slope_left[k + 1]
    )
    u = x - pos[k]
    return float(c0 + u * (c1 + u * (c2 + u * c3)))


def integral_from_zero_at(fld: PeakedField, x: float) -> float:
    """Integral of the field from 0 to an arbitrary point x."""
    pos = fld.positions
    k = _locate_cell(fld, x)
    w = cumulative_from_zero(fld)
    if x == pos[k]:
        return float(w[k])
    h = pos[k + 1] - pos[k]
    c0, c1, c2, c3 = _hermite_powers(
        h, fld.values[k], fld.values[k + 1], fld.slope_right[k], fld.slope_left[k + 1]
    )
    u = x - pos[k]
    part = u * (c0 + u * (c1 / 2.0 + u * (c2 / 3.0 + u * c3 / 4.0)))
    return float(w[k] + part)


# ---------------------------------------------------------------------------
# serialization

CSV_HEADER = ["s_label", "position", "value", "slope_left", "slope_right"]


def to_csv(fld: PeakedField, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i in range(fld.n_nodes):
            writer.writerow(
                [
                    FLOAT_FMT % fld.s_labels[i],
                    FLOAT_FMT % fld.positions[i],
                    FLOAT_FMT % fld.values[i],
                    FLOAT_FMT % fld.slope_left[i],
                    FLOAT_FMT % fld.slope_right[i],
                ]
            )


def from_csv(path) -> PeakedField:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise InputDataError(f"unexpected CSV header {header}")
        rows = np.array([[float(c) for c in row] for row in reader])
    return PeakedField.create(
        positions=rows[:, 1],
        values=rows[:, 2],
        slope_left=rows[:, 3],
        slope_right=rows[:, 4],
        s_labels=rows[:, 0],
    )
