"""
Dispersive qubit: two-level atom with level shift B and spontaneous decay gamma
in the basis (|e>, |g>).
"""

from typing import List, Tuple

import numpy as np

from ..core.exceptions import InvalidParameterError
from ..core.models import DispersiveQubitParams, ModelKind, StateVector, wrap_phase
from ..core.operators import OperatorMatrix, DecayChannel
from .base_system import BaseSystem

BASIS = ("e", "g")

class DispersiveQubit(BaseSystem):
    kind = ModelKind.DISPERSIVE

    def __init__(self, params: DispersiveQubitParams):
        super().__init__(params)

    @property
    def basis_labels(self) -> Tuple[str, ...]:
        return BASIS

    @property
    def evolution_time(self) -> float:
        return self.params.T

    def system_hamiltonian(self) -> OperatorMatrix:
        half = 0.5 * self.params.B
        return OperatorMatrix(np.diag([half, -half]), hermitian=True)

    def decay_channels(self) -> List[DecayChannel]:
        # sigma_minus = |g><e|
        return [DecayChannel("atom", [[0.0, 0.0], [1.0, 0.0]], self.params.gamma)]

    def initial_amplitudes(self) -> np.ndarray:
        half = 0.5 * self.params.theta
        return np.array([np.cos(half), np.sin(half)], dtype=complex)

    def amplitudes(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        p = self.params
        c, s = self.initial_amplitudes().real
        excited = c * np.exp(-0.5 * p.gamma * times - 0.5j * p.B * times)
        ground = s * np.exp(0.5j * p.B * times)
        return np.stack([excited, ground], axis=-1)

    def _require_cyclic(self):
        if not self.params.is_cyclic:
            raise InvalidParameterError(
                "Cyclic formula needs B*T = 2*pi",
                {"BT": self.params.B * self.params.T}
            )

    def beta_cyclic(self) -> float:
        self._require_cyclic()
        return float(-np.pi * (1.0 - np.cos(self.params.theta)))

    def beta_jump_first_order(self) -> float:
        p = self.params
        return self.beta_cyclic() - p.gamma * (np.pi * np.sin(p.theta)) ** 2 / (2.0 * p.B)

    def solid_angle(self) -> float:
        """Solid angle swept by the Bloch vector over one cycle"""
        self._require_cyclic()
        return float(2.0 * np.pi * (1.0 - np.cos(self.params.theta)))


def dispersive_state(p: DispersiveQubitParams, t: float) -> StateVector:
    if not 0.0 <= t <= p.T:
        raise InvalidParameterError("t must lie in [0, T]", {"t": t, "T": p.T})
    return DispersiveQubit(p).state(t)

def dispersive_beta_cyclic(p: DispersiveQubitParams, principal: bool = False) -> float:
    beta = DispersiveQubit(p).beta_cyclic()
    return wrap_phase(beta) if principal else beta

def dispersive_beta_jump_first_order(p: DispersiveQubitParams) -> float:
    return DispersiveQubit(p).beta_jump_first_order()

def dispersive_beta_exact(p: DispersiveQubitParams) -> float:
    """Joint-state geometric phase at any T (cyclic or not), principal value"""
    return DispersiveQubit(p).beta_exact()

def dispersive_solid_angle(p: DispersiveQubitParams) -> float:
    return DispersiveQubit(p).solid_angle()
