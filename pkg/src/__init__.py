"""
GeoPhase Engine Package
=======================

Geometric phase untuk sistem kuantum terbuka: joint-state phase, quantum-jump
phase, bath oracle dan protokol interferometri.
"""

__version__ = "1.0.0"
__author__ = "GeoPhase Team"

# Package information
__title__ = "GeoPhase Engine"
__description__ = "Geometric phases of open quantum systems with a discretized-bath oracle"
__license__ = "MIT"

# Export main components
from .core.models import (
    StateVector,
    Trajectory,
    PhaseReport,
    PhaseMethod,
    DispersiveQubitParams,
    JCParams
)
from .schemas.sweep_schemas import SweepConfig

__all__ = [
    "StateVector",
    "Trajectory",
    "PhaseReport",
    "PhaseMethod",
    "DispersiveQubitParams",
    "JCParams",
    "SweepConfig"
]
