"""
Sweep configuration, orchestration, CSV output and the command-line entry point.
"""

import numpy as np
import pandas as pd
import pytest

from config.config import Config
from main import main
from src.core.exceptions import ConfigError
from src.core.models import DispersiveQubitParams, JCParams
from src.schemas.sweep_schemas import (
    SweepConfig, MethodEnum, ModelEnum, load_sweep_config, parse_sweep_config, build_params
)
from src.orchestrator.sweep_orchestrator import RESULT_COLUMNS, run_sweep, write_csv, evaluate_point


def dispersive_sweep(**overrides) -> SweepConfig:
    data = {
        "sweep": {"model": "dispersive", "methods": ["joint-state", "quantum-jump"]},
        "params": {"B": 1.0, "gamma": 0.1},
        "axes": [{"name": "theta", "start": 0.3, "stop": 2.4, "steps": 4}],
        "numerics": {"dt": 1e-2},
    }
    data.update(overrides)
    return parse_sweep_config(data)


class TestSweepConfig:

    def test_grid_follows_axis(self):
        cfg = dispersive_sweep()
        grid = cfg.grid()
        assert len(grid) == 4
        assert_thetas = [point["theta"] for point in grid]
        assert assert_thetas == pytest.approx(list(np.linspace(0.3, 2.4, 4)))
        assert all(point["gamma"] == 0.1 for point in grid)

    def test_two_axes_first_outermost(self):
        cfg = dispersive_sweep(axes=[
            {"name": "gamma", "start": 0.0, "stop": 0.2, "steps": 2},
            {"name": "theta", "start": 0.5, "stop": 1.0, "steps": 3},
        ])
        grid = cfg.grid()
        assert [(p["gamma"], p["theta"]) for p in grid[:3]] == pytest.approx(
            [(0.0, 0.5), (0.0, 0.75), (0.0, 1.0)])
        assert grid[3]["gamma"] == pytest.approx(0.2)

    def test_degrees_are_converted(self):
        cfg = dispersive_sweep(
            sweep={"model": "dispersive", "degrees": True},
            axes=[{"name": "theta", "start": 90.0, "steps": 1}],
        )
        assert cfg.grid()[0]["theta"] == pytest.approx(np.pi / 2)

    def test_methods_are_sorted(self):
        cfg = dispersive_sweep(sweep={"model": "dispersive",
                                      "methods": ["quantum-jump", "oracle", "joint-state"]})
        assert cfg.sorted_methods() == [MethodEnum.JOINT_STATE, MethodEnum.ORACLE, MethodEnum.QUANTUM_JUMP]

    def test_too_many_axes(self):
        axes = [{"name": name, "start": 0.1, "steps": 1} for name in ("theta", "gamma", "T")]
        with pytest.raises(ConfigError):
            dispersive_sweep(axes=axes)

    def test_axes_must_be_disjoint(self):
        axes = [{"name": "theta", "start": 0.1, "steps": 1}, {"name": "theta", "start": 0.2, "steps": 1}]
        with pytest.raises(ConfigError):
            dispersive_sweep(axes=axes)

    def test_field_path_is_reported(self):
        with pytest.raises(ConfigError) as info:
            dispersive_sweep(axes=[{"name": "theta", "start": 0.1, "steps": 0}])
        assert info.value.field == "axes.0.steps"
        assert info.value.exit_code == 1

    def test_parameter_must_belong_to_model(self):
        with pytest.raises(ConfigError):
            dispersive_sweep(params={"kappa": 0.1})

    def test_oracle_needs_vacuum_doublet(self):
        with pytest.raises(ConfigError):
            parse_sweep_config({
                "sweep": {"model": "dissipative-jc", "methods": ["oracle"]},
                "params": {"n": 1.0},
            })

    def test_build_params_defaults(self):
        qubit = build_params(ModelEnum.DISPERSIVE, {})
        assert isinstance(qubit, DispersiveQubitParams)
        assert qubit.is_cyclic
        jc = build_params(ModelEnum.DISSIPATIVE_JC, {"n": 2.0, "kappa": 0.1})
        assert isinstance(jc, JCParams)
        assert jc.n == 2
        with pytest.raises(ValueError):
            build_params(ModelEnum.DISSIPATIVE_JC, {"n": 1.5})


class TestTomlLoading:

    def test_example_file(self):
        cfg = load_sweep_config("config/sweep_example.toml")
        assert cfg.model is ModelEnum.DISPERSIVE
        assert len(cfg.axes) == 1

    def test_syntax_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text('[sweep]\nmodel = "jc"\nmethods = [joint-state\n')
        with pytest.raises(ConfigError) as info:
            load_sweep_config(str(path))
        assert info.value.line == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_sweep_config(str(tmp_path / "absent.toml"))


class TestSweepExecution:

    def test_rows_and_columns(self):
        cfg = dispersive_sweep()
        frame = run_sweep(cfg, threads=2)
        assert list(frame.columns) == cfg.parameter_names + RESULT_COLUMNS
        assert len(frame) == 8
        assert list(frame["method"][:2]) == ["joint-state", "quantum-jump"]
        assert (frame["error"] == "").all()
        joint = frame[frame["method"] == "joint-state"]
        expected = [-np.pi * (1 - np.cos(theta)) for theta in np.linspace(0.3, 2.4, 4)]
        assert np.allclose(np.cos(joint["beta_principal"]), np.cos(expected), atol=1e-6)

    def test_parallel_run_is_deterministic(self, tmp_path):
        cfg = dispersive_sweep()
        serial = write_csv(run_sweep(cfg, threads=1), str(tmp_path / "serial.csv"))
        parallel = write_csv(run_sweep(cfg, threads=4), str(tmp_path / "parallel.csv"))
        assert serial.read_bytes() == parallel.read_bytes()

    def test_no_axes_gives_one_row_per_method(self):
        cfg = dispersive_sweep(axes=[])
        frame = run_sweep(cfg, threads=1)
        assert len(frame) == 2

    def test_invalid_point_fills_error_column(self):
        cfg = dispersive_sweep(axes=[{"name": "theta", "start": 3.0, "stop": 4.0, "steps": 2}])
        frame = run_sweep(cfg, threads=1)
        assert (frame["error"][:2] == "").all()
        assert (frame["error"][2:] != "").all()
        assert frame["beta_principal"][2:].isna().all()

    def test_guard_flag_in_jc_rows(self):
        cfg = parse_sweep_config({
            "sweep": {"model": "jc"},
            "params": {"g": 1.0, "delta": 0.0, "gamma": 1.0},
            "numerics": {"dt": 1e-2},
        })
        rows = evaluate_point(cfg, cfg.grid()[0], cfg.sorted_methods())
        assert rows[0]["warning_flags"] == "guard:rate_over_omega"
        assert np.isfinite(rows[0]["p_detect"])

    @pytest.mark.parametrize("guard_ratio, flags, detected", [
        (None, "", True),
        (0.01, "guard:rate_over_omega;p_detect_unavailable", False),
    ])
    def test_configured_guard_ratio_applies_everywhere(self, guard_ratio, flags, detected):
        numerics = {"dt": 1e-2} if guard_ratio is None else {"dt": 1e-2, "guard_ratio": guard_ratio}
        cfg = parse_sweep_config({
            "sweep": {"model": "dissipative-jc"},
            "params": {"g": 1.0, "delta": 0.5, "gamma": 0.05, "kappa": 0.03, "n": 1.0},
            "numerics": numerics,
        })
        row = evaluate_point(cfg, cfg.grid()[0], cfg.sorted_methods())[0]
        assert row["warning_flags"] == flags
        assert np.isfinite(row["p_detect"]) == detected
        assert row["error"] == ""

    def test_csv_round_trip(self, tmp_path):
        frame = run_sweep(dispersive_sweep(axes=[]), threads=1)
        path = write_csv(frame, str(tmp_path / "nested" / "out.csv"))
        loaded = pd.read_csv(path, keep_default_na=False)
        assert list(loaded.columns) == list(frame.columns)
        assert loaded["beta_principal"].astype(float).tolist() == frame["beta_principal"].tolist()


class TestCommandLine:

    def test_phase_command(self, tmp_path):
        out = tmp_path / "phase.csv"
        code = main(["phase", "--model", "dispersive", "--set", "gamma=0.1", "--set", "theta=1.0",
                     "--out", str(out)])
        assert code == 0
        assert len(pd.read_csv(out)) == 1

    def test_failed_row_is_numerical_failure(self):
        # resonant JC at a quarter Rabi period: final state orthogonal to the initial one
        code = main(["phase", "--model", "jc", "--set", "delta=0", "--set", "gamma=0",
                     "--set", f"T={np.pi / 2!r}", "--method", "joint-state"])
        assert code == 2

    def test_bad_assignment_is_config_error(self):
        assert main(["phase", "--set", "gamma"]) == 1

    def test_unknown_parameter_is_config_error(self):
        assert main(["phase", "--model", "jc", "--set", "theta=0.3"]) == 1

    def test_missing_config_file(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "none.toml")]) == 1

    def test_sweep_command_writes_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", "config/sweep_example.toml", "--out", str(out)]) == 0
        assert out.exists()

    def test_invalid_environment_settings(self, monkeypatch):
        monkeypatch.setattr(Config, "GUARD_RATIO", 1.5)
        assert main(["phase", "--model", "dispersive"]) == 1

    def test_ramsey_needs_jc(self):
        assert main(["ramsey", "--model", "dispersive"]) == 1

    def test_ramsey_command(self):
        assert main(["ramsey", "--model", "jc", "--set", "gamma=0.05", "--set", "delta=0.5",
                     "--gamma-g", "0.02"]) == 0
