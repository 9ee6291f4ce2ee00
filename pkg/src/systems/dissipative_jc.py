"""
Dissipative Jaynes-Cummings doublet: atomic decay gamma plus cavity loss kappa,
initial state |e,n>.
"""

from typing import Optional

import numpy as np

from ..core.models import JCParams, ModelKind, StateVector, ExpansionResult
from .jaynes_cummings import JaynesCummings

class DissipativeJC(JaynesCummings):
    """
    Same doublet algebra as the vacuum case with delta/2 + i(gamma-kappa)/4 and
    g sqrt(n+1) in the complex Rabi frequency.

    `include_common_phase=False` strips the photon-number phase exp(-i n delta t)
    shared by every branch of the initial photon number; interferometry uses it.
    """

    kind = ModelKind.DISSIPATIVE_JC

    def __init__(self, params: JCParams, include_common_phase: bool = True):
        super().__init__(params)
        self.include_common_phase = include_common_phase

    def amplitudes(self, times: np.ndarray, branch: int = 1) -> np.ndarray:
        amplitudes = super().amplitudes(times, branch)
        if self.include_common_phase:
            return amplitudes
        times = np.asarray(times, dtype=float)
        return amplitudes * np.exp(1j * self.params.n * self.params.delta * times)[:, None]


def dissipative_jc_state(p: JCParams, t: float, include_common_phase: bool = True) -> StateVector:
    return DissipativeJC(p, include_common_phase).state(t)

def dissipative_jc_beta_exact(p: JCParams, t: float = None) -> float:
    return DissipativeJC(p).beta_exact(t)

def dissipative_jc_beta_expansion(p: JCParams, guard_limit: Optional[float] = None) -> ExpansionResult:
    return DissipativeJC(p).lambda_expansion(guard_limit)

def dynamical_contamination(p: JCParams) -> float:
    return DissipativeJC(p).dynamical_contamination()
