"""Finite-dimensional peakon-train dynamics.

A superposition u(x, t) = sum_j m_j(t) phi(x - x_j(t)) solves the evolution
exactly when positions and amplitudes obey the canonical Hamiltonian system
with H = 1/2 sum_{jk} m_j m_k phi(x_j - x_k).  The diagonal uses the peak
convention phi'(0) = 0, so each peakon feels no self-force.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, InputDataError, IntegrationError
from .field import FLOAT_FMT

COLLISION_GAP = 1e-8


@dataclass(frozen=True)
class MultipeakonState:
    """Positions x (strictly increasing) and amplitudes m of a peakon train."""

    t: float
    x: np.ndarray
    m: np.ndarray

    @classmethod
    def create(cls, x, m, t: float = 0.0) -> "MultipeakonState":
        x = np.asarray(x, dtype=float)
        m = np.asarray(m, dtype=float)
        if x.ndim != 1 or x.shape != m.shape:
            raise InputDataError("x and m must be 1-d arrays of equal length")
        if x.size == 0:
            raise InputDataError("need at least one peakon")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(m)):
            raise InputDataError("non-finite peakon parameters")
        if not np.all(np.diff(x) > 0):
            raise InputDataError("peakon positions must be strictly increasing")
        return cls(t, x, m)

    @property
    def n(self) -> int:
        return self.x.size


def _phi_matrix(x: np.ndarray) -> np.ndarray:
    return np.exp(-np.abs(x[:, None] - x[None, :]))


def _phi_prime_matrix(x: np.ndarray) -> np.ndarray:
    d = x[:, None] - x[None, :]
    out = -np.sign(d) * np.exp(-np.abs(d))
    np.fill_diagonal(out, 0.0)
    return out


def mp_rhs(x: np.ndarray, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Velocities (dx/dt, dm/dt) of the peakon-train Hamiltonian system."""
    dx = _phi_matrix(x) @ m
    dm = -m * (_phi_prime_matrix(x) @ m)
    return dx, dm


def mp_hamiltonian(state: MultipeakonState) -> float:
    """H = 1/2 m . Phi(x) . m, conserved along the flow."""
    return 0.5 * float(state.m @ _phi_matrix(state.x) @ state.m)


def evaluate(state: MultipeakonState, grid) -> np.ndarray:
    """Values of u = sum m_j phi(x - x_j) on an arbitrary grid."""
    grid = np.asarray(grid, dtype=float)
    return np.exp(-np.abs(grid[:, None] - state.x[None, :])) @ state.m


def reconstruct(state: MultipeakonState, grid):
    """Sampled profile (values, slope_left, slope_right) on a grid.

    One-sided slopes differ at nodes that coincide with a peakon position.
    """
    grid = np.asarray(grid, dtype=float)
    d = grid[:, None] - state.x[None, :]
    e = np.exp(-np.abs(d))
    values = e @ state.m
    sgn_r = np.where(d >= 0.0, -1.0, 1.0)  # right limit of the slope sign
    sgn_l = np.where(d > 0.0, -1.0, 1.0)  # left limit
    slope_right = (sgn_r * e) @ state.m
    slope_left = (sgn_l * e) @ state.m
    return values, slope_left, slope_right


def mp_integrate(
    state: MultipeakonState,
    t_end: float,
    dt: float,
    *,
    record_every: int = 1,
) -> list[MultipeakonState]:
    """Fixed-step RK4 evolution of the peakon train.

    Raises :class:`CollisionError` when two adjacent positions come within
    ``COLLISION_GAP`` of each other (amplitudes blow up at a collision, so
    continuation is out of scope).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(round(t_end / dt)))
    h = t_end / n_steps
    x = state.x.copy()
    m = state.m.copy()
    out = [MultipeakonState(state.t, x.copy(), m.copy())]
    t = state.t
    for step in range(1, n_steps + 1):
        kx1, km1 = mp_rhs(x, m)
        kx2, km2 = mp_rhs(x + 0.5 * h * kx1, m + 0.5 * h * km1)
        kx3, km3 = mp_rhs(x + 0.5 * h * kx2, m + 0.5 * h * km2)
        kx4, km4 = mp_rhs(x + h * kx3, m + h * km3)
        x = x + (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4)
        m = m + (h / 6.0) * (km1 + 2.0 * km2 + 2.0 * km3 + km4)
        t = state.t + step * h
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(m))):
            raise IntegrationError(f"non-finite peakon parameters at t={t:.6g}")
        if x.size > 1 and np.min(np.diff(x)) < COLLISION_GAP:
            raise CollisionError(t)
        if step % record_every == 0 or step == n_steps:
            out.append(MultipeakonState(t, x.copy(), m.copy()))
    return out


def trajectory_csv_header(n: int) -> list[str]:
    return (
        ["t"]
        + [f"x_{k}" for k in range(1, n + 1)]
        + [f"m_{k}" for k in range(1, n + 1)]
        + ["H", "sum_m"]
    )


def trajectory_to_csv(states: list[MultipeakonState], path) -> None:
    n = states[0].n
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trajectory_csv_header(n))
        for st in states:
            row = (
                [st.t]
                + list(st.x)
                + list(st.m)
                + [mp_hamiltonian(st), float(np.sum(st.m))]
            )
            writer.writerow([FLOAT_FMT % v for v in row])
