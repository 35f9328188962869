import json

import pytest

from peakonlab.cli import ScenarioConfig, load_config, main, run
from peakonlab.errors import ConfigurationError


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


class TestLoadConfig:
    def test_minimal_config_applies_defaults(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"scenario": "verify"}))
        assert cfg.scenario == "verify"
        assert cfg.domain_half_width == 30.0
        assert cfg.nodes == 8001
        assert cfg.dt == 1e-3
        assert cfg.epsilon == 0.25
        assert cfg.mu == 0.01
        assert cfg.output_dir == "out"

    def test_populated_config(self, tmp_path):
        cfg = load_config(
            write_config(
                tmp_path, {"scenario": "instability", "epsilon": 0.3, "mu": 0.05}
            )
        )
        assert cfg.scenario == "instability"
        assert cfg.epsilon == 0.3
        assert cfg.mu == 0.05

    def test_unknown_scenario_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write_config(tmp_path, {"scenario": "bogus"}))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError, match="tolerance"):
            load_config(
                write_config(tmp_path, {"scenario": "verify", "tolerance": 1e-6})
            )

    def test_even_node_count_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write_config(tmp_path, {"scenario": "linear", "nodes": 4000}))

    def test_missing_scenario_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write_config(tmp_path, {"nodes": 101}))

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"scenario": verify}')
        with pytest.raises(ConfigurationError, match="line"):
            load_config(path)

    def test_non_object_json_rejected(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigurationError):
            load_config(path)


SMALL_NONLINEAR = {
    "scenario": "nonlinear",
    "t_end": 0.2,
    "dt": 0.01,
    "nodes": 1001,
    "domain_half_width": 10.0,
    "mu": 0.1,
    "epsilon": 0.2,
}


class TestRun:
    def test_nonlinear_scenario_outputs(self, tmp_path, monkeypatch):
        out = tmp_path / "results"
        monkeypatch.setenv("PEAKON_OUT", str(out))
        cfg = ScenarioConfig(**SMALL_NONLINEAR)
        assert run(cfg) == 0
        assert (out / "records.csv").exists()
        assert (out / "fields_t0p2.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["scenario"] == "nonlinear"
        assert summary["triggered"] is False

    def test_env_var_overrides_output_dir(self, tmp_path, monkeypatch):
        configured = tmp_path / "configured"
        actual = tmp_path / "actual"
        monkeypatch.setenv("PEAKON_OUT", str(actual))
        cfg = ScenarioConfig(**SMALL_NONLINEAR, output_dir=str(configured))
        assert run(cfg) == 0
        assert actual.exists()
        assert not configured.exists()

    def test_linear_scenario_growth_csv(self, tmp_path, monkeypatch):
        out = tmp_path / "lin"
        monkeypatch.setenv("PEAKON_OUT", str(out))
        cfg = ScenarioConfig(
            scenario="linear",
            t_end=1.0,
            dt=0.1,
            nodes=1001,
            domain_half_width=10.0,
            mu=0.1,
        )
        assert run(cfg) == 0
        lines = (out / "records.csv").read_text().splitlines()
        assert lines[0] == (
            "t,h1_pos_measured,h1_pos_predicted,h1_neg_measured,h1_neg_predicted"
        )
        assert len(lines) == 12  # header + 11 samples
        # coarse grid here; tight accuracy is covered by the solver tests
        last = [float(v) for v in lines[-1].split(",")]
        assert last[1] == pytest.approx(last[2], rel=0.05)
        assert last[3] == pytest.approx(last[4], rel=0.05)

    def test_multipeakon_scenario(self, tmp_path, monkeypatch):
        out = tmp_path / "mp"
        monkeypatch.setenv("PEAKON_OUT", str(out))
        cfg = ScenarioConfig(scenario="multipeakon", t_end=1.0, dt=0.01)
        assert run(cfg) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["H_drift"] < 1e-10
        assert summary["sum_m_drift"] < 1e-12

    def test_breakdown_is_exit_code_3_when_unexpected(self, tmp_path, monkeypatch):
        out = tmp_path / "bd"
        monkeypatch.setenv("PEAKON_OUT", str(out))
        cfg = ScenarioConfig(
            scenario="nonlinear",
            t_end=8.0,
            dt=0.002,
            nodes=1001,
            domain_half_width=10.0,
            mu=0.1,
            epsilon=0.5,
        )
        assert run(cfg) == 3
        summary = json.loads((out / "summary.json").read_text())
        assert summary["triggered"] is True
        assert summary["mechanism"] in (
            "slope_unbounded",
            "characteristic_compression",
        )


class TestMain:
    def test_usage_without_arguments(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_rejects_config_plus_scenario(self, tmp_path, capsys):
        path = write_config(tmp_path, {"scenario": "verify"})
        assert main([str(path), "--scenario", "verify"]) == 2
        assert "not both" in capsys.readouterr().err

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, {"scenario": "bogus"})
        assert main([str(path)]) == 2
        capsys.readouterr()

    def test_runs_config_file(self, tmp_path, monkeypatch):
        out = tmp_path / "run"
        monkeypatch.setenv("PEAKON_OUT", str(out))
        path = write_config(tmp_path, SMALL_NONLINEAR)
        assert main([str(path)]) == 0
        assert (out / "summary.json").exists()
