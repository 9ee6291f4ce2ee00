"""
Validation suite: individual oracle checks and the pass/fail plumbing.
"""

import numpy as np
import pytest

from main import main
from src.core.exceptions import ValidationFailure, NumericalInstabilityError
from src.orchestrator import validation_orchestrator as validation
from src.orchestrator.validation_orchestrator import (
    LEVELS, FAST_CHECKS, FULL_CHECKS, ValidationOrchestrator, run_validation
)


def passing_check():
    return 0.5, 1.0, "ok"


def failing_check():
    return 2.0, 1.0, "too large"


def raising_check():
    raise NumericalInstabilityError("state blew up")


class TestFastChecks:

    @pytest.mark.parametrize("check", [
        validation.check_closed_form_models,
        validation.check_jc_first_order,
        validation.check_jc_second_order,
        validation.check_zero_decay_baselines,
        validation.check_balanced_loss,
        validation.check_interferometry,
        validation.check_properties,
    ])
    def test_check_passes(self, check):
        measured, tolerance, detail = check()
        assert measured <= tolerance, detail

    def test_decay_independence(self):
        measured, tolerance, _ = validation.check_decay_independence()
        assert measured <= tolerance

    def test_jump_slope(self):
        # first-order slope at theta = pi/2 is -pi^2 / 2
        assert validation.jump_slope(np.pi / 2) == pytest.approx(-np.pi ** 2 / 2, rel=0.05)


@pytest.mark.slow
class TestOracleChecks:

    def test_dispersive_oracle(self):
        measured, tolerance, detail = validation.check_oracle_dispersive()
        assert measured <= tolerance, detail

    def test_markov_ladder(self):
        measured, tolerance, detail = validation.check_markov_ladder()
        assert measured <= tolerance, detail

    def test_two_bath_jc(self):
        measured, tolerance, detail = validation.check_two_bath_jc()
        assert measured <= tolerance, detail

    def test_fast_level_passes(self):
        report = run_validation("fast")
        assert report.passed
        assert len(report.results) == len(FAST_CHECKS)


class TestOrchestration:

    def test_levels(self):
        assert set(LEVELS) == {"fast", "full"}
        assert FULL_CHECKS[:len(FAST_CHECKS)] == FAST_CHECKS

    def test_error_becomes_failed_check(self):
        result = ValidationOrchestrator()._run_check("raises", raising_check)
        assert not result.passed
        assert result.measured == np.inf
        assert "NumericalInstabilityError" in result.detail

    def test_non_finite_measurement_fails(self):
        result = ValidationOrchestrator()._run_check("nan", lambda: (np.nan, 1.0, ""))
        assert not result.passed

    def test_failure_raises_with_exit_code(self, monkeypatch):
        monkeypatch.setitem(LEVELS, "fast", [("passes", passing_check), ("fails", failing_check)])
        with pytest.raises(ValidationFailure) as info:
            run_validation("fast")
        assert info.value.exit_code == 3
        assert "fails" in info.value.message

    def test_report_without_raising(self, monkeypatch):
        monkeypatch.setitem(LEVELS, "fast", [("passes", passing_check), ("fails", failing_check)])
        report = run_validation("fast", raise_on_failure=False)
        assert not report.passed
        assert [result.name for result in report.failures] == ["fails"]

    def test_cli_exit_codes(self, monkeypatch):
        monkeypatch.setitem(LEVELS, "fast", [("passes", passing_check)])
        assert main(["validate", "--level", "fast"]) == 0
        monkeypatch.setitem(LEVELS, "fast", [("fails", failing_check)])
        assert main(["validate", "--level", "fast"]) == 3
