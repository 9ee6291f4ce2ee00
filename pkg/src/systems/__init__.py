# Physical models: closed forms, exact phases, expansions
from .base_system import BaseSystem
from .dispersive_qubit import DispersiveQubit
from .jaynes_cummings import JaynesCummings
from .dissipative_jc import DissipativeJC

from ..core.models import DispersiveQubitParams, ModelParams

def build_system(params: ModelParams) -> BaseSystem:
    """Pick the model class for a parameter set"""
    if isinstance(params, DispersiveQubitParams):
        return DispersiveQubit(params)
    if params.n == 0 and params.kappa == 0:
        return JaynesCummings(params)
    return DissipativeJC(params)
