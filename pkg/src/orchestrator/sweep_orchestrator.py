import asyncio
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from config.config import Config
from ..core.exceptions import GeoPhaseError
from ..core.models import DispersiveQubitParams, JCParams, ModelParams, PhaseMethod
from ..schemas.sweep_schemas import SweepConfig, MethodEnum, NumericsConfig, build_params
from ..services.bath_oracle import build_flat_bath, evolve_joint, joint_phase_report
from ..services.interferometry import ramsey_pg, ramsey_pf_fock
from ..systems import build_system
from ..utils.logger import get_logger

logger = get_logger("SweepOrchestrator")

RESULT_COLUMNS = [
    "method", "total_phase", "dynamical_phase", "beta_principal", "beta_unwrapped",
    "survival_prob", "p_detect", "contamination", "warning_flags", "error",
]

class SweepOrchestrator:
    """
    Sweep Orchestrator - menjalankan grid parameter lewat worker pool terbatas

    Fungsi utama:
    1. Grid expansion - titik grid dalam urutan leksikografis axis
    2. Evaluation - satu work item per titik, semua method sekaligus
    3. Assembly - urutan baris deterministik, tidak tergantung urutan selesai
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads or Config.SWEEP_THREADS
        logger.info(f"Sweep Orchestrator initialized ({self.threads} threads)")

    async def run(self, cfg: SweepConfig) -> pd.DataFrame:
        """
        Evaluate every grid point of `cfg`

        Returns:
            DataFrame with one row per grid point per method
        """
        points = cfg.grid()
        methods = cfg.sorted_methods()
        threads = cfg.numerics.threads or self.threads
        logger.step("Sweep", f"{cfg.model.value}: {len(points)} points x {len(methods)} methods")

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=threads) as executor:
            tasks = [
                loop.run_in_executor(executor, evaluate_point, cfg, values, methods)
                for values in points
            ]
            results = await asyncio.gather(*tasks)

        rows = [row for point_rows in results for row in point_rows]
        frame = pd.DataFrame(rows, columns=cfg.parameter_names + RESULT_COLUMNS)
        failed = int((frame["error"] != "").sum())
        if failed:
            logger.warning(f"{failed} of {len(frame)} rows recorded an error")
        logger.success(f"Sweep finished: {len(frame)} rows")
        return frame

def run_sweep(cfg: SweepConfig, threads: Optional[int] = None) -> pd.DataFrame:
    """Synchronous entry point"""
    return asyncio.run(SweepOrchestrator(threads).run(cfg))

def write_csv(frame: pd.DataFrame, path: str) -> Path:
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, float_format=f"%.{Config.CSV_SIGNIFICANT_DIGITS}g",
                 lineterminator="\n")
    logger.info(f"CSV written to {output}")
    return output

def _empty_row(cfg: SweepConfig, values: Dict[str, float], method: MethodEnum) -> Dict[str, Any]:
    row: Dict[str, Any] = {name: values.get(name, np.nan) for name in cfg.parameter_names}
    row.update({column: np.nan for column in RESULT_COLUMNS})
    row.update({"method": method.value, "warning_flags": "", "error": ""})
    return row

def _guard_flags(system, params: ModelParams, guard_limit: Optional[float]) -> List[str]:
    if not isinstance(params, JCParams):
        return []
    return list(system.guard_flags(system.guard_ratio(), "rate_over_omega", guard_limit))

def _detection_probability(params: ModelParams, dt: Optional[float], guard_limit: Optional[float]):
    if isinstance(params, DispersiveQubitParams):
        return np.nan, []
    try:
        if params.n == 0 and params.kappa == 0:
            return ramsey_pg(params, dt).p_detect, []
        return ramsey_pf_fock(params, dt, guard_limit=guard_limit).p_detect, []
    except GeoPhaseError as e:
        logger.debug(f"Detection probability unavailable: {e.message}")
        return np.nan, ["p_detect_unavailable"]

def _oracle_report(params: ModelParams, numerics: NumericsConfig, dt: Optional[float]):
    bandwidth = numerics.bath_bandwidth or Config.BATH_BANDWIDTH
    modes = numerics.bath_modes or Config.BATH_MODES
    if numerics.bath_center is not None:
        center = numerics.bath_center
    elif isinstance(params, DispersiveQubitParams):
        center = params.B
    else:
        center = 0.0
    spec = build_flat_bath(params.gamma, bandwidth, modes, center)
    trajectory = evolve_joint(spec, params, dt=dt)
    return joint_phase_report(trajectory, trajectory.hamiltonian)

def evaluate_point(cfg: SweepConfig, values: Dict[str, float],
                   methods: List[MethodEnum]) -> List[Dict[str, Any]]:
    """
    All method rows for one grid point. Failures land in the `error` column
    of the affected rows; the sweep goes on.
    """
    rows = [_empty_row(cfg, values, method) for method in methods]
    try:
        params = build_params(cfg.model, values)
    except (GeoPhaseError, ValueError) as e:
        for row in rows:
            row["error"] = getattr(e, "message", str(e))
        return rows

    resolved = params.to_dict()
    dt = cfg.numerics.dt
    system = build_system(params)
    guard_limit = cfg.numerics.guard_ratio
    flags = _guard_flags(system, params, guard_limit)
    p_detect, detect_flags = _detection_probability(params, dt, guard_limit)
    contamination = (system.dynamical_contamination()
                     if isinstance(params, JCParams) else np.nan)
    trajectory = None

    for row, method in zip(rows, methods):
        row.update({name: resolved.get(name, row[name]) for name in cfg.parameter_names})
        row["p_detect"] = p_detect
        row["contamination"] = contamination
        row["warning_flags"] = ";".join(flags + detect_flags)
        try:
            if method is MethodEnum.ORACLE:
                report = _oracle_report(params, cfg.numerics, dt)
            else:
                if trajectory is None:
                    trajectory = system.integrate(dt=dt)
                report = system.phase_report(PhaseMethod(method.value), trajectory=trajectory)
        except (GeoPhaseError, ArithmeticError, ValueError) as e:
            row["error"] = f"{e.__class__.__name__}: {getattr(e, 'message', str(e))}"
            continue
        row.update({
            "total_phase": report.total_phase,
            "dynamical_phase": report.dynamical_phase,
            "beta_principal": report.geometric_phase,
            "beta_unwrapped": report.geometric_phase_unwrapped,
            "survival_prob": report.survival_prob,
        })
    return rows
