"""
Exceptions untuk GeoPhase engine
================================

Satu root exception (`GeoPhaseError`) dengan subclass per jenis kegagalan.
Setiap subclass membawa `exit_code` yang dipakai oleh CLI.
"""

from typing import Any, Dict, Optional


class GeoPhaseError(Exception):
    """Base error for the engine"""

    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            "error_code": self.__class__.__name__,
            "error_message": self.message,
            "details": self.details
        }


class DimensionMismatchError(GeoPhaseError, ValueError):
    """Operator / state shapes do not agree"""


class InvalidParameterError(GeoPhaseError, ValueError):
    """Parameter outside its physical or numerical domain"""


class NumericalInstabilityError(GeoPhaseError, ArithmeticError):
    """Non-finite amplitudes or vanishing norm during a computation"""


class OrthogonalStatesError(GeoPhaseError):
    """
    Overlap between initial and final state is at or below the overlap floor,
    so the total phase is undefined.
    """

    def __init__(self, overlap: float, floor: float):
        super().__init__(
            f"States are orthogonal within floor: |overlap|={overlap:.3e} <= {floor:.1e}",
            {"overlap": overlap, "floor": floor}
        )
        self.overlap = overlap
        self.floor = floor


class RecurrenceHorizonError(GeoPhaseError):
    """Requested oracle time reaches the discretized-bath recurrence time"""


class ConfigError(GeoPhaseError):
    """Sweep configuration could not be parsed or validated"""

    exit_code = 1

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}", {"line": line, "field": field})
        self.line = line
        self.field = field


class ValidationFailure(GeoPhaseError):
    """One or more oracle checks failed"""

    exit_code = 3


class GuardViolationWarning(UserWarning):
    """Perturbative ratio exceeded the configured guard; result is flagged"""
