"""Experiment runner: JSON config in, deterministic CSV/JSON artifacts out.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 breakdown before the goal in scenarios where breakdown is unexpected.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, fields as dc_fields
from pathlib import Path

import numpy as np

from . import field as fld_mod
from .errors import CollisionError, ConfigurationError, PeakonLabError
from .field import FLOAT_FMT, graded_grid
from .linear import h1_identity_rhs, measured_h1_sq, solve_linear
from .multipeakon import (
    MultipeakonState,
    mp_hamiltonian,
    mp_integrate,
    trajectory_to_csv,
)
from .nonlinear import (
    InitialDataSpec,
    build_initial_data,
    instability_experiment,
    integrate,
    records_to_csv,
    threshold_time,
)
from .verify import run_all

SCENARIOS = ("verify", "linear", "nonlinear", "instability", "multipeakon")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    domain_half_width: float = 30.0
    nodes: int = 8001
    h_min: float | None = None
    dt: float = 1e-3
    t_end: float | None = None
    epsilon: float = 0.25
    mu: float = 0.01
    output_dir: str = "out"

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(
                f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}"
            )
        if self.nodes % 2 == 0:
            raise ConfigurationError("nodes must be odd so a node sits at 0")
        if self.domain_half_width <= 5.0:
            raise ConfigurationError("domain_half_width must exceed 5")
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")


def load_config(path) -> ScenarioConfig:
    """Parse a flat JSON object whose keys are exactly ScenarioConfig fields."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: top-level JSON value must be an object")
    known = {f.name for f in dc_fields(ScenarioConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(
            f"{path}: unknown config field(s) {sorted(unknown)}; allowed: {sorted(known)}"
        )
    if "scenario" not in raw:
        raise ConfigurationError(f"{path}: missing required field 'scenario'")
    cfg = ScenarioConfig(**raw)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# scenario implementations


def _out_dir(config: ScenarioConfig) -> Path:
    out = Path(os.environ.get("PEAKON_OUT", config.output_dir))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_summary(out: Path, payload: dict) -> None:
    with open(out / "summary.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _stamp(t: float) -> str:
    return ("%g" % t).replace(".", "p").replace("-", "m")


def _initial_grid(config: ScenarioConfig) -> np.ndarray:
    h_min = config.h_min if config.h_min is not None else config.mu / 10.0
    return graded_grid(config.domain_half_width, config.nodes, h_min)


def _scenario_verify(config: ScenarioConfig) -> int:
    rows = run_all()
    out = _out_dir(config)
    width = max(len(name) for name, _, _ in rows)
    for name, passed, detail in rows:
        print(f"{'PASS' if passed else 'FAIL'}  {name:<{width}}  {detail}")
    _write_summary(
        out,
        {
            "scenario": "verify",
            "checks": [
                {"name": name, "passed": passed, "detail": detail}
                for name, passed, detail in rows
            ],
            "all_passed": all(passed for _, passed, _ in rows),
        },
    )
    return 0 if all(passed for _, passed, _ in rows) else 1


def _scenario_linear(config: ScenarioConfig) -> int:
    t_end = config.t_end if config.t_end is not None else 5.0
    grid = _initial_grid(config)
    v0 = build_initial_data(InitialDataSpec(config.epsilon, config.mu), grid)
    out = _out_dir(config)
    n_samples = max(2, int(round(t_end / config.dt)) + 1)
    ts = np.linspace(0.0, t_end, n_samples)
    with open(out / "records.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t", "h1_pos_measured", "h1_pos_predicted", "h1_neg_measured", "h1_neg_predicted"]
        )
        for t in ts:
            state = solve_linear(v0, float(t))
            writer.writerow(
                FLOAT_FMT % v
                for v in (
                    t,
                    measured_h1_sq(state, "positive"),
                    h1_identity_rhs(v0, float(t), "positive"),
                    measured_h1_sq(state, "negative"),
                    h1_identity_rhs(v0, float(t), "negative"),
                )
            )
    final = solve_linear(v0, t_end)
    fld_mod.to_csv(final.to_field(), out / f"fields_t{_stamp(t_end)}.csv")
    _write_summary(
        out,
        {
            "scenario": "linear",
            "t_end": t_end,
            "h1_pos_final": measured_h1_sq(final, "positive"),
            "h1_neg_final": measured_h1_sq(final, "negative"),
            "growth_factor_pos": measured_h1_sq(final, "positive")
            / measured_h1_sq(solve_linear(v0, 0.0), "positive"),
        },
    )
    return 0


def _scenario_nonlinear(config: ScenarioConfig) -> int:
    t_end = config.t_end if config.t_end is not None else 1.0
    grid = _initial_grid(config)
    v0 = build_initial_data(InitialDataSpec(config.epsilon, config.mu), grid)
    states, report, records = integrate(
        v0, t_end, config.dt, trace_bound_epsilon=config.epsilon
    )
    out = _out_dir(config)
    records_to_csv(records, out / "records.csv")
    final = states[-1]
    fld_mod.to_csv(final.perturbation_field(), out / f"fields_t{_stamp(final.t)}.csv")
    _write_summary(
        out,
        {
            "scenario": "nonlinear",
            "t_end": t_end,
            "t_reached": final.t,
            "triggered": report.triggered,
            "mechanism": report.mechanism,
            "t_break": report.t_break,
            "min_slope": report.min_slope,
            "min_jacobian": report.min_jacobian,
        },
    )
    # a breakdown before the requested horizon is unexpected in this scenario
    return 3 if report.triggered else 0


def _scenario_instability(config: ScenarioConfig) -> int:
    tau = threshold_time(config.epsilon)
    t_max = config.t_end if config.t_end is not None else tau + 1.0
    t0, records, report = instability_experiment(
        config.epsilon,
        config.mu,
        t_max,
        config.dt,
        half_width=config.domain_half_width,
        n_nodes=config.nodes,
    )
    out = _out_dir(config)
    records_to_csv(records, out / "records.csv")
    # orbital-stability margin: how small the perturbation stays in H1 while
    # its slope grows past 1
    h1_max = max(r.h1_v for r in records)
    _write_summary(
        out,
        {
            "scenario": "instability",
            "epsilon": config.epsilon,
            "mu": config.mu,
            "t0": t0,
            "tau": tau,
            "triggered": report.triggered,
            "mechanism": report.mechanism,
            "t_break": report.t_break,
            "max_h1_v": h1_max,
            "goal_met": (t0 is not None and t0 <= tau + 1.0)
            or report.mechanism == "slope_unbounded",
        },
    )
    # breakdown is an acceptable witness of instability here
    return 0


def _scenario_multipeakon(config: ScenarioConfig) -> int:
    t_end = config.t_end if config.t_end is not None else 10.0
    initial = MultipeakonState.create([-1.0, 1.0], [1.0, 0.5])
    try:
        states = mp_integrate(initial, t_end, config.dt, record_every=10)
    except CollisionError as exc:
        print(f"error: unexpected peakon collision at t={exc.t:.6g}", file=sys.stderr)
        return 3
    out = _out_dir(config)
    trajectory_to_csv(states, out / "records.csv")
    h0, h1 = mp_hamiltonian(states[0]), mp_hamiltonian(states[-1])
    _write_summary(
        out,
        {
            "scenario": "multipeakon",
            "t_end": t_end,
            "H_initial": h0,
            "H_final": h1,
            "H_drift": abs(h1 - h0),
            "sum_m_drift": abs(float(np.sum(states[-1].m) - np.sum(states[0].m))),
        },
    )
    return 0


_DISPATCH = {
    "verify": _scenario_verify,
    "linear": _scenario_linear,
    "nonlinear": _scenario_nonlinear,
    "instability": _scenario_instability,
    "multipeakon": _scenario_multipeakon,
}


def run(config: ScenarioConfig) -> int:
    config.validate()
    return _DISPATCH[config.scenario](config)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="peakonlab",
        description="Peaked-wave perturbation experiments (deterministic, CSV/JSON output).",
    )
    parser.add_argument("config", nargs="?", help="path to a JSON scenario config")
    parser.add_argument(
        "--scenario", choices=SCENARIOS, help="run a scenario with default settings"
    )
    args = parser.parse_args(argv)
    try:
        if args.config is not None and args.scenario is not None:
            raise ConfigurationError("pass either a config file or --scenario, not both")
        if args.config is not None:
            config = load_config(args.config)
        elif args.scenario is not None:
            config = ScenarioConfig(scenario=args.scenario)
        else:
            parser.print_usage(sys.stderr)
            return 2
        return run(config)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PeakonLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
