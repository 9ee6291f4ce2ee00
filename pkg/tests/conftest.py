"""Shared fixtures: parameter sets used across the suite"""

import numpy as np
import pytest

from src.core.models import DispersiveQubitParams, JCParams, StateVector
from src.core.operators import OperatorMatrix


@pytest.fixture
def cyclic_qubit() -> DispersiveQubitParams:
    return DispersiveQubitParams.cyclic(B=1.0, gamma=0.2, theta=np.pi / 3)


@pytest.fixture
def vacuum_jc() -> JCParams:
    return JCParams(g=1.0, delta=0.5, gamma=0.05)


@pytest.fixture
def fock_jc() -> JCParams:
    return JCParams(g=1.0, delta=0.5, gamma=0.05, kappa=0.03, n=1)


@pytest.fixture
def excited_state() -> StateVector:
    return StateVector(("e", "g"), [1.0, 0.0])


@pytest.fixture
def lossy_generator() -> OperatorMatrix:
    """Non-normal, non-Hermitian 2x2 generator with distinct eigenvalues"""
    return OperatorMatrix([[0.3 - 0.2j, 0.8], [0.8, -0.4 - 0.05j]])
