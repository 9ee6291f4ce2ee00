from dataclasses import dataclass, field
from typing import Optional, List, Dict, Any, Tuple, Union
from enum import Enum

import numpy as np

from .exceptions import DimensionMismatchError, InvalidParameterError

TWO_PI = 2.0 * np.pi

class PhaseMethod(Enum):
    JOINT_STATE = "joint-state"
    QUANTUM_JUMP = "quantum-jump"
    ORACLE = "oracle"

class ModelKind(Enum):
    DISPERSIVE = "dispersive"
    JC = "jc"
    DISSIPATIVE_JC = "dissipative-jc"

class RamseyProtocol(Enum):
    QUBIT_PG = "qubit-Pg"
    MULTI_CHANNEL_PG = "multi-channel-Pg"
    FOCK_PF = "fock-Pf"

def _frozen_array(values: Any, dtype=complex) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array

def wrap_phase(angle):
    """Map an angle (or array of angles) to the principal interval (-pi, pi]"""
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), TWO_PI)
    # mod may round up to exactly 2 pi
    wrapped = np.where(wrapped <= -np.pi, np.pi, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped

@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over an ordered, labeled basis"""
    basis_labels: Tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = tuple(self.basis_labels)
        amplitudes = _frozen_array(self.amplitudes).reshape(-1)
        if len(labels) < 1:
            raise DimensionMismatchError("StateVector needs at least one basis state")
        if amplitudes.shape[0] != len(labels):
            raise DimensionMismatchError(
                f"{amplitudes.shape[0]} amplitudes for {len(labels)} basis labels"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise InvalidParameterError("StateVector amplitudes must be finite")
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dimension(self) -> int:
        return len(self.basis_labels)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>"""
        self.require_same_basis(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def require_same_basis(self, other: "StateVector"):
        if self.basis_labels != other.basis_labels:
            raise DimensionMismatchError("States live on different bases")

    def component(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis_labels.index(label)])

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self.basis_labels, self.amplitudes * factor)

    def normalized(self) -> "StateVector":
        norm = np.sqrt(self.norm_squared())
        if norm == 0.0:
            raise InvalidParameterError("Cannot normalize the zero vector")
        return self.scaled(1.0 / norm)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            label: [float(amp.real), float(amp.imag)]
            for label, amp in zip(self.basis_labels, self.amplitudes)
        }

@dataclass(frozen=True)
class Trajectory:
    """
    Time-ordered states produced by one generator.

    `states` holds one row per time; `state(k)` wraps a row as a StateVector.
    """
    times: np.ndarray
    states: np.ndarray
    basis_labels: Tuple[str, ...]
    hamiltonian: Any

    def __post_init__(self):
        times = _frozen_array(self.times, dtype=float).reshape(-1)
        states = _frozen_array(self.states)
        if states.ndim != 2 or states.shape[0] != times.shape[0]:
            raise DimensionMismatchError("Trajectory needs one state row per time")
        if states.shape[1] != len(self.basis_labels):
            raise DimensionMismatchError("Trajectory rows do not match the basis")
        if times.shape[0] == 0 or times[0] != 0.0:
            raise InvalidParameterError("Trajectory must start at t = 0")
        if np.any(np.diff(times) <= 0.0):
            raise InvalidParameterError("Trajectory times must be strictly increasing")
        first_norm = float(np.vdot(states[0], states[0]).real)
        if abs(first_norm - 1.0) > 1e-12:
            raise InvalidParameterError(f"Initial state not normalized: norm^2 = {first_norm!r}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self) > 1 else 0.0

    def state(self, index: int) -> StateVector:
        return StateVector(self.basis_labels, self.states[index])

    @property
    def initial_state(self) -> StateVector:
        return self.state(0)

    @property
    def final_state(self) -> StateVector:
        return self.state(-1)

    def norms_squared(self) -> np.ndarray:
        return np.einsum("ti,ti->t", self.states.conj(), self.states).real

    @property
    def survival_probability(self) -> float:
        return float(self.norms_squared()[-1])

    def overlaps_with_initial(self) -> np.ndarray:
        """<psi(0)|psi(t_k)> for every stored time"""
        return self.states @ self.states[0].conj()

    def concatenate(self, other: "Trajectory") -> "Trajectory":
        """Append a trajectory that starts where this one ends"""
        if other.basis_labels != self.basis_labels:
            raise DimensionMismatchError("Cannot join trajectories on different bases")
        if not np.allclose(other.states[0], self.states[-1], atol=1e-12):
            raise InvalidParameterError("Second segment must start from the final state of the first")
        times = np.concatenate([self.times, self.t_final + other.times[1:]])
        states = np.concatenate([self.states, other.states[1:]])
        return Trajectory(times, states, self.basis_labels, self.hamiltonian)

@dataclass(frozen=True)
class PhaseReport:
    """Result dari phase engine untuk satu trajectory"""
    total_phase: float
    dynamical_phase: float
    geometric_phase: float
    geometric_phase_unwrapped: float
    survival_prob: float
    method: PhaseMethod
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            "method": self.method.value,
            "total_phase": self.total_phase,
            "dynamical_phase": self.dynamical_phase,
            "beta_principal": self.geometric_phase,
            "beta_unwrapped": self.geometric_phase_unwrapped,
            "survival_prob": self.survival_prob,
            **self.diagnostics
        }

@dataclass(frozen=True)
class DispersiveQubitParams:
    """Two-level atom with level shift B, decay gamma, initial polar angle theta"""
    B: float
    gamma: float
    theta: float
    T: float

    def __post_init__(self):
        if not self.B > 0:
            raise InvalidParameterError("B must be positive", {"B": self.B})
        if self.gamma < 0:
            raise InvalidParameterError("gamma must be non-negative", {"gamma": self.gamma})
        if not 0.0 <= self.theta <= np.pi:
            raise InvalidParameterError("theta must lie in [0, pi]", {"theta": self.theta})
        if not (np.isfinite(self.T) and self.T >= 0):
            raise InvalidParameterError("T must be finite and non-negative", {"T": self.T})

    @classmethod
    def cyclic(cls, B: float, gamma: float, theta: float) -> "DispersiveQubitParams":
        return cls(B=B, gamma=gamma, theta=theta, T=TWO_PI / B)

    @property
    def is_cyclic(self) -> bool:
        return abs(self.B * self.T - TWO_PI) < 1e-12

    def to_dict(self) -> Dict[str, Any]:
        return {"B": self.B, "gamma": self.gamma, "theta": self.theta, "T": self.T}

@dataclass(frozen=True)
class JCParams:
    """
    Jaynes-Cummings doublet {|e,n>, |g,n+1>} with atomic decay gamma and cavity decay kappa.
    T defaults to one Rabi cycle pi / Omega_n.
    """
    g: float
    delta: float
    gamma: float = 0.0
    kappa: float = 0.0
    n: int = 0
    T: Optional[float] = None

    def __post_init__(self):
        if not self.g > 0:
            raise InvalidParameterError("g must be positive", {"g": self.g})
        if self.gamma < 0 or self.kappa < 0:
            raise InvalidParameterError("decay rates must be non-negative",
                                        {"gamma": self.gamma, "kappa": self.kappa})
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParameterError("n must be a non-negative integer", {"n": self.n})
        object.__setattr__(self, "n", int(self.n))
        if self.T is not None and not (np.isfinite(self.T) and self.T >= 0):
            raise InvalidParameterError("T must be finite and non-negative", {"T": self.T})

    @property
    def coupling(self) -> float:
        """Effective doublet coupling g*sqrt(n+1)"""
        return self.g * np.sqrt(self.n + 1)

    @property
    def omega(self) -> float:
        """Vacuum Rabi frequency sqrt(g^2 + delta^2/4)"""
        return float(np.sqrt(self.g ** 2 + self.delta ** 2 / 4))

    @property
    def omega_n(self) -> float:
        return float(np.sqrt(self.g ** 2 * (self.n + 1) + self.delta ** 2 / 4))

    @property
    def theta_n(self) -> float:
        return float(np.arccos(np.clip(self.delta / (2 * self.omega_n), -1.0, 1.0)))

    @property
    def rabi_time(self) -> float:
        return float(np.pi / self.omega_n)

    @property
    def evolution_time(self) -> float:
        return self.rabi_time if self.T is None else float(self.T)

    @property
    def effective_rate(self) -> float:
        """gamma - kappa, the combination entering lambda_n"""
        return self.gamma - self.kappa

    def to_dict(self) -> Dict[str, Any]:
        return {"g": self.g, "delta": self.delta, "gamma": self.gamma,
                "kappa": self.kappa, "n": self.n, "T": self.evolution_time}

ModelParams = Union[DispersiveQubitParams, JCParams]

@dataclass(frozen=True)
class DressedDecomposition:
    plus_state: StateVector
    minus_state: StateVector
    gamma_plus: float
    gamma_minus: float
    theta: float
    plus_energy: float
    minus_energy: float

@dataclass(frozen=True)
class ExpansionResult:
    """Second-order perturbative approximants with guard bookkeeping"""
    lambda_approx: complex
    beta_approx: float
    beta_zero: float
    ratio: float
    warning_flags: Tuple[str, ...] = ()

    @property
    def flagged(self) -> bool:
        return bool(self.warning_flags)

@dataclass(frozen=True)
class BathSpec:
    """Discretized flat reservoir: N modes, detunings from omega_a, equal couplings"""
    detunings: np.ndarray
    couplings: np.ndarray
    target_gamma: float
    bandwidth: float
    center: float = 0.0

    def __post_init__(self):
        detunings = _frozen_array(self.detunings, dtype=float).reshape(-1)
        couplings = _frozen_array(self.couplings, dtype=float).reshape(-1)
        if detunings.shape != couplings.shape or detunings.shape[0] < 1:
            raise DimensionMismatchError("detunings and couplings need the same length >= 1")
        if np.any(couplings < 0):
            raise InvalidParameterError("couplings must be real and non-negative")
        object.__setattr__(self, "detunings", detunings)
        object.__setattr__(self, "couplings", couplings)

    @property
    def mode_count(self) -> int:
        return int(self.detunings.shape[0])

    @property
    def spacing(self) -> float:
        return float(self.detunings[1] - self.detunings[0]) if self.mode_count > 1 else np.inf

    @property
    def t_max(self) -> float:
        """Recurrence horizon 2 pi / delta_omega"""
        return TWO_PI / self.spacing

    @property
    def markovian_rate(self) -> float:
        """2 pi g_k^2 / delta_omega for the central mode"""
        return float(TWO_PI * self.couplings[self.mode_count // 2] ** 2 / self.spacing)

@dataclass(frozen=True)
class RamseyOutcome:
    """Result of one interferometric protocol"""
    protocol: RamseyProtocol
    p_detect: float
    p_formula: float
    factors: Dict[str, float]
    beta_reference: float
    beta_recovered: float
    cos_beta_recovered: float
    sector_populations: Dict[str, float]
    warning_flags: Tuple[str, ...] = ()

    @property
    def total_population(self) -> float:
        return float(sum(self.sector_populations.values()))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            "protocol": self.protocol.value,
            "p_detect": self.p_detect,
            "p_formula": self.p_formula,
            "beta_reference": self.beta_reference,
            "beta_recovered": self.beta_recovered,
            "cos_beta_recovered": self.cos_beta_recovered,
            **{f"factor_{name}": value for name, value in self.factors.items()},
            "warning_flags": ";".join(self.warning_flags)
        }

@dataclass
class CheckResult:
    """Result dari satu validation check"""
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            "name": self.name,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail
        }

@dataclass
class ValidationReport:
    level: str
    results: List[CheckResult]
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]
