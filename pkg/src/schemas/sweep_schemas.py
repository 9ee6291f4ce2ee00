"""
Sweep Schemas untuk GeoPhase CLI
================================

Pydantic models untuk file konfigurasi sweep (TOML) dan loader-nya.
"""

import re
import sys
if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..core.exceptions import ConfigError
from ..core.models import DispersiveQubitParams, JCParams, ModelParams

class ModelEnum(str, Enum):
    DISPERSIVE = "dispersive"
    JC = "jc"
    DISSIPATIVE_JC = "dissipative-jc"

class MethodEnum(str, Enum):
    JOINT_STATE = "joint-state"
    QUANTUM_JUMP = "quantum-jump"
    ORACLE = "oracle"

# Parameter names accepted per model, in CSV column order
MODEL_PARAMETERS: Dict[ModelEnum, List[str]] = {
    ModelEnum.DISPERSIVE: ["B", "gamma", "theta", "T"],
    ModelEnum.JC: ["g", "delta", "gamma", "T"],
    ModelEnum.DISSIPATIVE_JC: ["g", "delta", "gamma", "kappa", "n", "T"],
}
AXIS_NAMES = {"theta", "gamma", "delta", "g", "kappa", "n", "T"}
ANGLE_PARAMETERS = {"theta"}

class SweepAxis(BaseModel):
    """Satu axis sweep: linspace(start, stop, steps)"""
    name: str = Field(..., description="Nama parameter")
    start: float = Field(..., description="Nilai awal")
    stop: Optional[float] = Field(None, description="Nilai akhir (default = start)")
    steps: int = Field(1, ge=1, description="Jumlah titik")

    @model_validator(mode="after")
    def _check_name(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis '{self.name}' is not one of {sorted(AXIS_NAMES)}")
        return self

    def values(self) -> np.ndarray:
        stop = self.start if self.stop is None else self.stop
        return np.linspace(self.start, stop, self.steps)

class NumericsConfig(BaseModel):
    """Knob numerik; None berarti pakai Config"""
    dt: Optional[float] = Field(None, gt=0, description="Step integrator")
    bath_bandwidth: Optional[float] = Field(None, gt=0, description="Bandwidth W bath oracle")
    bath_modes: Optional[int] = Field(None, ge=1, description="Jumlah mode N bath oracle")
    bath_center: Optional[float] = Field(None, description="Pusat band bath (default: transisi yang memancar)")
    guard_ratio: Optional[float] = Field(None, gt=0, lt=1, description="Guard rasio perturbatif")
    threads: Optional[int] = Field(None, ge=1, description="Ukuran worker pool")

class SweepConfig(BaseModel):
    """Konfigurasi satu sweep"""
    model: ModelEnum = Field(..., description="Model fisik")
    params: Dict[str, float] = Field(default_factory=dict, description="Parameter tetap")
    axes: List[SweepAxis] = Field(default_factory=list, description="Maksimal dua axis")
    methods: List[MethodEnum] = Field(default_factory=lambda: [MethodEnum.JOINT_STATE])
    output: Optional[str] = Field(None, description="Path CSV output")
    degrees: bool = Field(False, description="Sudut di config dalam derajat")
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)

    @model_validator(mode="after")
    def _check_names(self):
        allowed = MODEL_PARAMETERS[self.model]
        if len(self.axes) > 2:
            raise ValueError("at most two sweep axes are supported")
        axis_names = [axis.name for axis in self.axes]
        if len(set(axis_names)) != len(axis_names):
            raise ValueError("sweep axes must be disjoint")
        for name in list(self.params) + axis_names:
            if name not in allowed:
                raise ValueError(f"parameter '{name}' is not valid for model '{self.model.value}'")
        if not self.methods:
            raise ValueError("at least one method is required")
        if MethodEnum.ORACLE in self.methods and self.model is ModelEnum.DISSIPATIVE_JC:
            n_values = [self.params.get("n", 0.0)] + [
                value for axis in self.axes if axis.name == "n" for value in axis.values()
            ]
            if any(value != 0 for value in n_values):
                raise ValueError("oracle method covers the vacuum doublet only (n = 0)")
        return self

    @property
    def parameter_names(self) -> List[str]:
        return MODEL_PARAMETERS[self.model]

    def to_radians(self, name: str, value: float) -> float:
        if self.degrees and name in ANGLE_PARAMETERS:
            return float(np.deg2rad(value))
        return float(value)

    def sorted_methods(self) -> List[MethodEnum]:
        return sorted(set(self.methods), key=lambda method: method.value)

    def grid(self) -> List[Dict[str, float]]:
        """Grid points in lexicographic axis order (first axis outermost)"""
        base = {name: self.to_radians(name, value) for name, value in self.params.items()}
        points = [base]
        for axis in self.axes:
            points = [
                {**point, axis.name: self.to_radians(axis.name, value)}
                for point in points for value in axis.values()
            ]
        return points

def build_params(model: ModelEnum, values: Dict[str, float]) -> ModelParams:
    """Turn one grid point into the model's parameter object"""
    if model is ModelEnum.DISPERSIVE:
        B = values.get("B", 1.0)
        T = values.get("T", 2 * np.pi / B)
        return DispersiveQubitParams(B=B, gamma=values.get("gamma", 0.0),
                                     theta=values.get("theta", np.pi / 2), T=T)
    n = values.get("n", 0.0)
    if float(n) != round(n):
        raise ValueError(f"n must be an integer, got {n}")
    return JCParams(
        g=values.get("g", 1.0),
        delta=values.get("delta", 0.0),
        gamma=values.get("gamma", 0.0),
        kappa=values.get("kappa", 0.0),
        n=int(round(n)),
        T=values.get("T")
    )

_LINE_PATTERN = re.compile(r"line (\d+)")

def load_sweep_config(path: str) -> SweepConfig:
    """
    Load and validate a TOML sweep file

    Raises:
        ConfigError: with the offending line (syntax) or field (schema)
    """
    try:
        with open(Path(path), "rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        match = _LINE_PATTERN.search(str(e))
        raise ConfigError(f"TOML syntax error: {e}", line=int(match.group(1)) if match else None)
    return parse_sweep_config(data)

def parse_sweep_config(data: Dict[str, Any]) -> SweepConfig:
    """Map the TOML layout ([sweep], [params], [[axes]], [numerics]) onto SweepConfig"""
    section = dict(data.get("sweep", {}))
    payload = {
        **section,
        "params": data.get("params", {}),
        "axes": data.get("axes", []),
        "numerics": data.get("numerics", {}),
    }
    try:
        return SweepConfig(**payload)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first.get("loc", ())) or None
        raise ConfigError(first.get("msg", str(e)), field=field)
