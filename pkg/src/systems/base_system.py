from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

import numpy as np

from ..core.models import StateVector, Trajectory, PhaseReport, PhaseMethod, ModelParams, ModelKind, wrap_phase
from ..core.operators import OperatorMatrix, DecayChannel
from ..core.state import conditional_hamiltonian_channels, propagate, time_grid
from ..core.phase import geometric_phase, total_phase, dynamical_phase_joint
from ..utils.logger import get_logger

logger = get_logger("SystemBase")

class BaseSystem(ABC):
    """
    Base abstract class for all open-system models

    Subclasses supply the Hamiltonian, decay channels, initial state and the
    closed-form no-jump amplitudes; the phase pipeline lives here.
    """

    kind: ModelKind

    def __init__(self, params: ModelParams):
        self.params = params
        self.name = self.__class__.__name__
        logger.debug(f"{self.name} initialized with {params.to_dict()}")

    @property
    @abstractmethod
    def basis_labels(self) -> Tuple[str, ...]:
        pass

    @property
    @abstractmethod
    def evolution_time(self) -> float:
        """Default cycle time T of the model"""
        pass

    @abstractmethod
    def system_hamiltonian(self) -> OperatorMatrix:
        """
        Hermitian H_s restricted to the tracked subspace

        Returns:
            OperatorMatrix flagged Hermitian
        """
        pass

    @abstractmethod
    def decay_channels(self) -> List[DecayChannel]:
        pass

    @abstractmethod
    def initial_amplitudes(self) -> np.ndarray:
        pass

    @abstractmethod
    def amplitudes(self, times: np.ndarray) -> np.ndarray:
        """
        Closed-form no-jump amplitudes, one row per time

        Args:
            times: Array of evolution times

        Returns:
            Complex array of shape (len(times), dimension)
        """
        pass

    def initial_state(self) -> StateVector:
        return StateVector(self.basis_labels, self.initial_amplitudes())

    def conditional_hamiltonian(self) -> OperatorMatrix:
        return conditional_hamiltonian_channels(self.system_hamiltonian(), self.decay_channels())

    def state(self, t: Optional[float] = None) -> StateVector:
        t = self.evolution_time if t is None else t
        return StateVector(self.basis_labels, self.amplitudes(np.array([t]))[0])

    def closed_form_trajectory(self, t_final: Optional[float] = None, dt: Optional[float] = None) -> Trajectory:
        """Closed-form amplitudes sampled on the same grid `propagate` uses"""
        t_final = self.evolution_time if t_final is None else t_final
        times = time_grid(t_final, dt)
        return Trajectory(times, self.amplitudes(times), self.basis_labels, self.conditional_hamiltonian())

    def integrate(self, t_final: Optional[float] = None, dt: Optional[float] = None) -> Trajectory:
        """RK4 no-jump trajectory of the conditional Hamiltonian"""
        t_final = self.evolution_time if t_final is None else t_final
        return propagate(self.conditional_hamiltonian(), self.initial_state(), t_final, dt)

    def joint_dynamical_phase(self, t: Optional[float] = None) -> float:
        t = self.evolution_time if t is None else t
        return dynamical_phase_joint(self.initial_state(), self.system_hamiltonian(), t)

    def beta_exact(self, t: Optional[float] = None) -> float:
        """Joint-state geometric phase from the closed-form state, principal value"""
        t = self.evolution_time if t is None else t
        phi = total_phase(self.initial_state(), self.state(t))
        return wrap_phase(phi - self.joint_dynamical_phase(t))

    def phase_report(self, method: PhaseMethod, dt: Optional[float] = None,
                     trajectory: Optional[Trajectory] = None) -> PhaseReport:
        trajectory = self.integrate(dt=dt) if trajectory is None else trajectory
        return geometric_phase(trajectory, self.system_hamiltonian(), method)
