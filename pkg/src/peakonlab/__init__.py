"""Numerical laboratory for peaked traveling waves of a shallow-water model.

The package provides:

- ``field``: piecewise-C1 fields with a single corner, grids, norms, CSV I/O;
- ``kernel``: the exponential Green function and the nonlocal operators Q, P
  via O(N) one-sided exponential sweeps;
- ``linear``: the linearized evolution around the peakon, in closed form
  along characteristics, plus its H1 growth identities;
- ``nonlinear``: the full perturbation dynamics along characteristics with
  wave-breaking detection and the sharply localized instability experiment;
- ``multipeakon``: the finite-dimensional Hamiltonian peakon-train system;
- ``oracles`` / ``verify``: slow quadrature references and a self-check
  suite of closed-form identities;
- ``cli``: a deterministic JSON-config experiment runner.
"""

from .errors import (
    CollisionError,
    ConfigurationError,
    ExtrapolationError,
    GridError,
    InputDataError,
    IntegrationError,
    JumpGenerationError,
    PeakonLabError,
)
from .field import PeakedField, graded_grid, sample, scale, uniform_grid
from .kernel import conv_P, conv_Q, conv_QP, phi, phi_prime
from .linear import LinearState, linear_ode_reference, solve_linear
from .multipeakon import MultipeakonState, mp_hamiltonian, mp_integrate
from .nonlinear import (
    BlowupReport,
    InitialDataSpec,
    NonlinearState,
    RunRecord,
    build_initial_data,
    instability_experiment,
    integrate,
    threshold_time,
)

__version__ = "0.1.0"

__all__ = [
    "BlowupReport",
    "CollisionError",
    "ConfigurationError",
    "ExtrapolationError",
    "GridError",
    "InitialDataSpec",
    "InputDataError",
    "IntegrationError",
    "JumpGenerationError",
    "LinearState",
    "MultipeakonState",
    "NonlinearState",
    "PeakedField",
    "PeakonLabError",
    "RunRecord",
    "build_initial_data",
    "conv_P",
    "conv_Q",
    "conv_QP",
    "graded_grid",
    "instability_experiment",
    "integrate",
    "linear_ode_reference",
    "mp_hamiltonian",
    "mp_integrate",
    "phi",
    "phi_prime",
    "sample",
    "scale",
    "solve_linear",
    "threshold_time",
    "uniform_grid",
]
