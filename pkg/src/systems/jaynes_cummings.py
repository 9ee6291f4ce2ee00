"""
Jaynes-Cummings doublet {|e,n>, |g,n+1>} with atomic decay into free space.

All doublet formulas are written for general (n, kappa); the `jc_*` functions
are the vacuum-doublet entry points (n = 0, kappa = 0).
"""

import warnings
from typing import List, Optional, Tuple

import numpy as np

from config.config import Config
from ..core.exceptions import InvalidParameterError, GuardViolationWarning
from ..core.models import JCParams, ModelKind, StateVector, DressedDecomposition, ExpansionResult
from ..core.operators import OperatorMatrix, DecayChannel
from .base_system import BaseSystem
from ..utils.logger import get_logger

logger = get_logger("JaynesCummings")

class JaynesCummings(BaseSystem):
    """
    H_s = [[n delta, g sqrt(n+1)], [g sqrt(n+1), (n+1) delta]] on {|e,n>, |g,n+1>}

    The no-jump generator adds -i gamma/2 |e><e| and -i kappa/2 a^dagger a.
    """

    kind = ModelKind.JC

    def __init__(self, params: JCParams):
        super().__init__(params)

    @property
    def basis_labels(self) -> Tuple[str, ...]:
        n = self.params.n
        return (f"e,{n}", f"g,{n + 1}")

    @property
    def evolution_time(self) -> float:
        return self.params.evolution_time

    def system_hamiltonian(self) -> OperatorMatrix:
        p = self.params
        coupling = p.coupling
        return OperatorMatrix(
            [[p.n * p.delta, coupling], [coupling, (p.n + 1) * p.delta]],
            hermitian=True
        )

    def decay_channels(self) -> List[DecayChannel]:
        p = self.params
        return [
            # sigma_minus sends |e,n> out of the doublet to |g,n>
            DecayChannel("atom", [[1.0, 0.0]], p.gamma),
            # a maps the doublet onto {|e,n-1>, |g,n>}
            DecayChannel("photon", np.diag([np.sqrt(p.n), np.sqrt(p.n + 1)]), p.kappa),
        ]

    def initial_amplitudes(self) -> np.ndarray:
        return np.array([1.0, 0.0], dtype=complex)

    @property
    def detuning_term(self) -> complex:
        """a_n = delta/2 + i (gamma - kappa)/4"""
        return 0.5 * self.params.delta + 0.25j * self.params.effective_rate

    def complex_rabi_frequency(self, branch: int = 1) -> complex:
        """lambda_n, principal square root unless branch = -1"""
        p = self.params
        return branch * np.sqrt(complex(p.coupling ** 2 + self.detuning_term ** 2))

    def envelope(self, times: np.ndarray) -> np.ndarray:
        p = self.params
        rate = (1j * p.delta + 0.5 * p.kappa) * (2 * p.n + 1) / 2 + 0.25 * p.gamma
        return np.exp(-rate * times)

    def amplitudes(self, times: np.ndarray, branch: int = 1) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        lam = self.complex_rabi_frequency(branch)
        # sin(lambda t)/lambda, regular at lambda = 0
        sin_over_lambda = times * np.sinc(lam * times / np.pi)
        envelope = self.envelope(times)
        excited = envelope * (np.cos(lam * times) + 1j * self.detuning_term * sin_over_lambda)
        ground = envelope * (-1j * self.params.coupling * sin_over_lambda)
        return np.stack([excited, ground], axis=-1)

    def beta_zero(self) -> float:
        p = self.params
        return float(np.pi * (1.0 - p.delta / (2.0 * p.omega_n)))

    def guard_ratio(self) -> float:
        p = self.params
        return abs(p.effective_rate) / p.omega_n

    def guard_flags(self, ratio: float, label: str, limit: Optional[float] = None) -> Tuple[str, ...]:
        limit = Config.GUARD_RATIO if limit is None else limit
        if ratio <= limit:
            return ()
        message = f"{label}={ratio:.3f} exceeds guard {limit}"
        warnings.warn(message, GuardViolationWarning, stacklevel=3)
        logger.warning(message)
        return (f"guard:{label}",)

    def lambda_expansion(self, guard_limit: Optional[float] = None) -> ExpansionResult:
        """
        Second order in (gamma - kappa)/Omega_n at T = pi/Omega_n:
            lambda ~ Omega_n + i delta eps/(8 Omega_n) - G^2 eps^2/(32 Omega_n^3)
            beta   ~ beta0 - 3 pi G^2 delta eps^2/(64 Omega_n^5)
        with eps = gamma - kappa and G^2 = g^2 (n+1).
        """
        p = self.params
        omega = p.omega_n
        eps = p.effective_rate
        coupling_sq = p.coupling ** 2
        ratio = self.guard_ratio()
        flags = self.guard_flags(ratio, "rate_over_omega", guard_limit)

        lambda_approx = (
            omega
            + 1j * p.delta * eps / (8 * omega)
            - coupling_sq * eps ** 2 / (32 * omega ** 3)
        )
        beta_zero = self.beta_zero()
        beta_approx = beta_zero - 3 * np.pi * coupling_sq * p.delta * eps ** 2 / (64 * omega ** 5)
        return ExpansionResult(
            lambda_approx=complex(lambda_approx),
            beta_approx=float(beta_approx),
            beta_zero=beta_zero,
            ratio=ratio,
            warning_flags=flags
        )

    def dynamical_contamination(self) -> float:
        """
        phi_d(quantum-jump) - phi_d(joint-state) at T = pi/Omega_n, first order
        in (gamma - kappa)/Omega_n.
        """
        p = self.params
        return float(
            -np.pi ** 2 * p.coupling ** 2 * p.delta * p.effective_rate / (8 * p.omega_n ** 4)
        )

    def dressed_decomposition(self) -> DressedDecomposition:
        """
        Eigenbasis of H_s on the vacuum doublet. |+> carries weight cos^2(theta/2)
        on |e,0>; the |g,1> components follow the sign convention of H_s.
        """
        p = self.params
        if p.n != 0:
            raise InvalidParameterError("Dressed decomposition is defined for the vacuum doublet (n = 0)")
        theta = p.theta_n
        c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
        labels = self.basis_labels
        return DressedDecomposition(
            plus_state=StateVector(labels, [c, -s]),
            minus_state=StateVector(labels, [s, c]),
            gamma_plus=float(p.gamma * c ** 2 + p.kappa * s ** 2),
            gamma_minus=float(p.gamma * s ** 2 + p.kappa * c ** 2),
            theta=theta,
            plus_energy=0.5 * p.delta - p.omega_n,
            minus_energy=0.5 * p.delta + p.omega_n
        )

    def dressed_amplitudes(self, times: np.ndarray) -> np.ndarray:
        """
        Approximate no-jump amplitudes with each dressed branch decaying at
        its own rate (off-diagonal damping between branches dropped).
        """
        times = np.asarray(times, dtype=float)
        dressed = self.dressed_decomposition()
        c, s = np.cos(0.5 * dressed.theta), np.sin(0.5 * dressed.theta)
        plus = c * np.exp(-(1j * dressed.plus_energy + 0.5 * dressed.gamma_plus) * times)
        minus = s * np.exp(-(1j * dressed.minus_energy + 0.5 * dressed.gamma_minus) * times)
        return (plus[:, None] * dressed.plus_state.amplitudes
                + minus[:, None] * dressed.minus_state.amplitudes)


def _require_vacuum_doublet(p: JCParams):
    if p.n != 0 or p.kappa != 0:
        raise InvalidParameterError("Vacuum-doublet formula needs n = 0 and kappa = 0",
                                    {"n": p.n, "kappa": p.kappa})

def jc_state(p: JCParams, t: float) -> StateVector:
    _require_vacuum_doublet(p)
    return JaynesCummings(p).state(t)

def jc_beta_exact(p: JCParams, t: float = None) -> float:
    _require_vacuum_doublet(p)
    return JaynesCummings(p).beta_exact(t)

def jc_lambda_expansion(p: JCParams, guard_limit: Optional[float] = None) -> ExpansionResult:
    _require_vacuum_doublet(p)
    return JaynesCummings(p).lambda_expansion(guard_limit)

def dressed_decomposition(p: JCParams) -> DressedDecomposition:
    return JaynesCummings(p).dressed_decomposition()

def dressed_joint_amplitude(p: JCParams, t: float) -> StateVector:
    system = JaynesCummings(p)
    return StateVector(system.basis_labels, system.dressed_amplitudes(np.array([t]))[0])
