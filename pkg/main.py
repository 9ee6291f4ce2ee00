"""
GeoPhase - Main Application
===========================

Geometric phase engine untuk sistem kuantum terbuka.

Subcommands:
    phase     satu titik parameter
    sweep     grid parameter ke CSV
    validate  suite oracle (fast / full)
    ramsey    protokol interferometri

Exit codes: 0 sukses, 1 config error, 2 numerical failure, 3 validation failure.
"""

import argparse
import sys
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from rich.table import Table

from config.config import Config
from src.core.exceptions import GeoPhaseError, ConfigError
from src.core.models import JCParams, RamseyOutcome
from src.schemas.sweep_schemas import (
    SweepConfig, ModelEnum, MethodEnum, load_sweep_config, parse_sweep_config, build_params
)
from src.orchestrator.sweep_orchestrator import run_sweep, write_csv, evaluate_point
from src.orchestrator.validation_orchestrator import run_validation
from src.services.interferometry import ramsey_pg, ramsey_pg_multichannel, ramsey_pf_fock
from src.utils.logger import get_logger

logger = get_logger("MainApplication")

PHASE_TABLE_COLUMNS = ("method", "beta_principal", "beta_unwrapped", "dynamical_phase",
                       "survival_prob", "p_detect", "error")

def _parse_assignments(assignments: Optional[List[str]]) -> Dict[str, float]:
    values = {}
    for item in assignments or []:
        name, separator, raw = item.partition("=")
        if not separator:
            raise ConfigError(f"Expected name=value, got '{item}'", field="--set")
        try:
            values[name.strip()] = float(raw)
        except ValueError:
            raise ConfigError(f"Value of '{name}' is not a number: '{raw}'", field=name.strip())
    return values

class GeoPhaseApp:
    """Main application class: CLI dispatch dan rendering hasil"""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        invalid = [name for name, ok in Config.validate_config().items() if not ok]
        if invalid:
            raise ConfigError(f"Invalid environment settings: {', '.join(invalid)}", field="env")
        logger.debug(f"Configuration: {Config.get_config_summary()}")

    def _config(self) -> SweepConfig:
        args = self.args
        if getattr(args, "config", None):
            cfg = load_sweep_config(args.config)
        else:
            cfg = parse_sweep_config({
                "sweep": {"model": getattr(args, "model", None) or ModelEnum.DISPERSIVE.value},
                "params": _parse_assignments(getattr(args, "set", None)),
            })
        if getattr(args, "method", None):
            cfg = cfg.model_copy(update={"methods": [MethodEnum(m) for m in args.method]})
        return cfg

    def run(self) -> int:
        command = self.args.command
        handler = {
            "phase": self.run_phase,
            "sweep": self.run_sweep,
            "validate": self.run_validate,
            "ramsey": self.run_ramsey,
        }[command]
        return handler() or 0

    def run_phase(self):
        cfg = self._config()
        if cfg.axes:
            raise ConfigError("'phase' evaluates a single point; use 'sweep' for axes", field="axes")
        values = cfg.grid()[0]
        rows = evaluate_point(cfg, values, cfg.sorted_methods())
        self._print_rows(rows, f"Phase report ({cfg.model.value})")
        if self.args.out:
            write_csv(pd.DataFrame(rows), self.args.out)
        failed = [row["method"] for row in rows if row["error"]]
        if failed:
            logger.error(f"Numerical failure in: {', '.join(failed)}")
            return GeoPhaseError.exit_code
        return 0

    def run_sweep(self):
        cfg = self._config()
        frame = run_sweep(cfg, self.args.threads)
        output = self.args.out or cfg.output or f"{Config.OUTPUT_PATH}/sweep_{cfg.model.value}.csv"
        write_csv(frame, output)

    def run_validate(self):
        run_validation(self.args.level)

    def run_ramsey(self):
        cfg = self._config()
        params = build_params(cfg.model, cfg.grid()[0])
        if not isinstance(params, JCParams):
            raise ConfigError("Ramsey protocols need a Jaynes-Cummings model", field="model")
        outcomes: List[RamseyOutcome] = []
        if params.n == 0 and params.kappa == 0:
            outcomes.append(ramsey_pg(params))
            if self.args.gamma_g is not None:
                outcomes.append(ramsey_pg_multichannel(params, self.args.gamma_g))
        else:
            outcomes.append(ramsey_pf_fock(params))
        self._print_outcomes(outcomes)

    def _print_rows(self, rows, title: str):
        table = Table(title=title)
        for column in PHASE_TABLE_COLUMNS:
            table.add_column(column)
        for row in rows:
            table.add_row(*[_format(row[column]) for column in PHASE_TABLE_COLUMNS])
        logger.console.print(table)

    def _print_outcomes(self, outcomes: List[RamseyOutcome]):
        table = Table(title="Ramsey protocols")
        for column in ("protocol", "P simulated", "P formula", "beta", "cos beta recovered", "flags"):
            table.add_column(column)
        for outcome in outcomes:
            table.add_row(
                outcome.protocol.value, _format(outcome.p_detect), _format(outcome.p_formula),
                _format(outcome.beta_reference), _format(outcome.cos_beta_recovered),
                ";".join(outcome.warning_flags)
            )
        logger.console.print(table)

def _format(value) -> str:
    if isinstance(value, float):
        return "" if np.isnan(value) else f"{value:.10g}"
    return str(value)

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geophase", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_model_options(sub):
        sub.add_argument("--config", help="TOML sweep file")
        sub.add_argument("--model", choices=[m.value for m in ModelEnum], help="model (without --config)")
        sub.add_argument("--set", action="append", metavar="NAME=VALUE", help="fixed parameter (repeatable)")

    phase = subparsers.add_parser("phase", help="single parameter point")
    add_model_options(phase)
    phase.add_argument("--method", action="append", choices=[m.value for m in MethodEnum])
    phase.add_argument("--out", help="optional CSV output")

    sweep = subparsers.add_parser("sweep", help="parameter grid to CSV")
    add_model_options(sweep)
    sweep.add_argument("--method", action="append", choices=[m.value for m in MethodEnum])
    sweep.add_argument("--out", help="CSV output (overrides the config)")
    sweep.add_argument("--threads", type=int, help="worker pool size")

    validate = subparsers.add_parser("validate", help="oracle validation suite")
    validate.add_argument("--level", choices=["fast", "full"], default="fast")

    ramsey = subparsers.add_parser("ramsey", help="interferometric protocols")
    add_model_options(ramsey)
    ramsey.add_argument("--gamma-g", type=float, help="decay rate into |g> for the multi-channel protocol")
    return parser

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return GeoPhaseApp(args).run()
    except GeoPhaseError as e:
        logger.error(f"{e.__class__.__name__}: {e.message}")
        return e.exit_code
    except (ArithmeticError, ValueError) as e:
        logger.error(f"Numerical failure: {e}")
        return 2
    except KeyboardInterrupt:
        logger.warning("Dihentikan oleh user")
        return 130

if __name__ == "__main__":
    sys.exit(main())
