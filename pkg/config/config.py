import os
from typing import Dict, Any
from dotenv import load_dotenv
from pathlib import Path

load_dotenv()

class Config:
    """
    Configuration class untuk GeoPhase engine
    Semua nilai numerik dapat di-override lewat environment / file .env
    """

    # Integrator
    DEFAULT_DT = float(os.getenv("GEOPHASE_DEFAULT_DT", "1e-3"))
    MIN_STEPS = int(os.getenv("GEOPHASE_MIN_STEPS", "10000"))

    # Phase engine tolerances
    OVERLAP_FLOOR = float(os.getenv("GEOPHASE_OVERLAP_FLOOR", "1e-10"))
    HERMITIAN_TOL = float(os.getenv("GEOPHASE_HERMITIAN_TOL", "1e-12"))
    DEFECTIVE_TOL = float(os.getenv("GEOPHASE_DEFECTIVE_TOL", "1e-13"))

    # Perturbative validity guard (gamma/Omega, |gamma-kappa|/Omega_n, ...)
    GUARD_RATIO = float(os.getenv("GEOPHASE_GUARD_RATIO", "0.3"))

    # Bath oracle
    BATH_BANDWIDTH = float(os.getenv("GEOPHASE_BATH_BANDWIDTH", "40.0"))
    BATH_MODES = int(os.getenv("GEOPHASE_BATH_MODES", "801"))
    MIN_BATH_MODES = int(os.getenv("GEOPHASE_MIN_BATH_MODES", "201"))
    BANDWIDTH_FACTOR = float(os.getenv("GEOPHASE_BANDWIDTH_FACTOR", "20.0"))
    MAX_JOINT_DIMENSION = int(os.getenv("GEOPHASE_MAX_JOINT_DIMENSION", "100000"))
    DENSE_LIMIT = int(os.getenv("GEOPHASE_DENSE_LIMIT", "1000"))

    # Sweep execution
    SWEEP_THREADS = int(os.getenv("GEOPHASE_SWEEP_THREADS", "4"))
    CSV_SIGNIFICANT_DIGITS = int(os.getenv("GEOPHASE_CSV_DIGITS", "17"))

    # Application Settings
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_TO_FILE = os.getenv("LOG_TO_FILE", "true").lower() == "true"
    LOG_DIR = os.getenv("LOG_DIR", "logs")
    OUTPUT_PATH = os.getenv("OUTPUT_PATH", "outputs")

    @classmethod
    def ensure_directories(cls):
        """Ensure semua directory yang diperlukan ada"""
        for directory in (cls.OUTPUT_PATH, cls.LOG_DIR):
            Path(directory).mkdir(parents=True, exist_ok=True)

    @classmethod
    def default_dt(cls, t_final: float) -> float:
        """Step default: min(DEFAULT_DT, T / MIN_STEPS)"""
        if t_final <= 0:
            return cls.DEFAULT_DT
        return min(cls.DEFAULT_DT, t_final / cls.MIN_STEPS)

    @classmethod
    def validate_config(cls) -> Dict[str, bool]:
        """Sanity flags for values coming from the environment"""
        validation_results = {}

        validation_results["dt_positive"] = cls.DEFAULT_DT > 0
        validation_results["tolerances_positive"] = all(
            tol > 0 for tol in (cls.OVERLAP_FLOOR, cls.HERMITIAN_TOL, cls.DEFECTIVE_TOL)
        )
        validation_results["guard_valid"] = 0.0 < cls.GUARD_RATIO < 1.0
        # odd mode count keeps delta_k = 0 on the grid
        validation_results["bath_modes_valid"] = (
            cls.BATH_MODES >= cls.MIN_BATH_MODES and cls.BATH_MODES % 2 == 1
        )
        validation_results["threads_valid"] = cls.SWEEP_THREADS >= 1

        try:
            cls.ensure_directories()
            validation_results["directories_accessible"] = True
        except Exception:
            validation_results["directories_accessible"] = False

        return validation_results

    @classmethod
    def get_config_summary(cls) -> Dict[str, Any]:
        """Get configuration summary"""
        return {
            "integrator": {
                "default_dt": cls.DEFAULT_DT,
                "min_steps": cls.MIN_STEPS
            },
            "tolerances": {
                "overlap_floor": cls.OVERLAP_FLOOR,
                "hermitian": cls.HERMITIAN_TOL,
                "defective": cls.DEFECTIVE_TOL,
                "guard_ratio": cls.GUARD_RATIO
            },
            "bath": {
                "bandwidth": cls.BATH_BANDWIDTH,
                "modes": cls.BATH_MODES,
                "max_dimension": cls.MAX_JOINT_DIMENSION
            },
            "sweep": {
                "threads": cls.SWEEP_THREADS,
                "csv_digits": cls.CSV_SIGNIFICANT_DIGITS
            },
            "paths": {
                "logs": cls.LOG_DIR,
                "outputs": cls.OUTPUT_PATH
            }
        }
