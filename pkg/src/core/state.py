"""
State core: no-jump generator, RK4 propagation, closed-form 2x2 propagation
"""

from typing import Iterable, Optional, Union

import numpy as np

from config.config import Config
from .exceptions import DimensionMismatchError, InvalidParameterError, NumericalInstabilityError
from .models import StateVector, Trajectory
from .operators import OperatorMatrix, ArrowHamiltonian, DecayChannel
from ..utils.logger import get_logger

logger = get_logger("StateCore")

Generator = Union[OperatorMatrix, ArrowHamiltonian]

EIGENVECTOR_CONDITION_LIMIT = 1e6

def _as_channel(o: Union[OperatorMatrix, DecayChannel, np.ndarray], gamma: float) -> DecayChannel:
    if isinstance(o, DecayChannel):
        return o
    entries = o.entries if isinstance(o, OperatorMatrix) else o
    return DecayChannel("o", entries, gamma)

def conditional_hamiltonian(h_s: OperatorMatrix, o, gamma: float) -> OperatorMatrix:
    """
    No-jump generator H_s - (i gamma / 2) o^dagger o.

    `o` may be rectangular (post-jump image outside the tracked subspace); its
    column count must match h_s.
    """
    return conditional_hamiltonian_channels(h_s, [_as_channel(o, gamma)])

def conditional_hamiltonian_channels(h_s: OperatorMatrix, channels: Iterable[DecayChannel]) -> OperatorMatrix:
    if not h_s.is_hermitian():
        raise InvalidParameterError("System Hamiltonian must be Hermitian")
    entries = np.array(h_s.entries, dtype=complex)
    any_loss = False
    for channel in channels:
        if channel.dimension != h_s.dimension:
            raise DimensionMismatchError(
                f"Channel '{channel.label}' acts on dimension {channel.dimension}, system has {h_s.dimension}"
            )
        if channel.rate > 0:
            entries = entries - 0.5j * channel.rate * channel.number_operator()
            any_loss = True
    return OperatorMatrix(entries, hermitian=not any_loss)

def time_grid(t_final: float, dt: Optional[float] = None) -> np.ndarray:
    """Uniform grid ending exactly at t_final with step <= dt"""
    if not (np.isfinite(t_final) and t_final >= 0):
        raise InvalidParameterError("t_final must be finite and non-negative", {"t_final": t_final})
    dt = Config.default_dt(t_final) if dt is None else dt
    if not dt > 0:
        raise InvalidParameterError("dt must be positive", {"dt": dt})
    if t_final == 0:
        return np.zeros(1)
    steps = max(1, int(np.ceil(t_final / dt - 1e-9)))
    return np.linspace(0.0, t_final, steps + 1)

def _require_normalized(psi0: StateVector):
    norm = psi0.norm_squared()
    if abs(norm - 1.0) > 1e-12:
        raise InvalidParameterError(f"Initial state must be normalized (norm^2 = {norm!r})")

def propagate(h: Generator, psi0: StateVector, t_final: float, dt: Optional[float] = None) -> Trajectory:
    """
    Integrate i d|psi>/dt = h|psi> with classical RK4 on a uniform grid.

    The state is never renormalized: for a no-jump generator the norm decay is
    the survival probability. Dense generators apply the precomputed RK4 step
    polynomial, which is the same arithmetic map as the four stages.
    """
    _require_normalized(psi0)
    if h.dimension != psi0.dimension:
        raise DimensionMismatchError(
            f"Generator of dimension {h.dimension} and state of dimension {psi0.dimension}"
        )

    times = time_grid(t_final, dt)
    states = np.empty((times.shape[0], psi0.dimension), dtype=complex)
    states[0] = psi0.amplitudes
    if times.shape[0] > 1:
        step = times[1] - times[0]
        if isinstance(h, OperatorMatrix):
            _propagate_dense(h, states, step)
        else:
            _propagate_stages(h, states, step)

    logger.debug(
        f"Propagated {psi0.dimension}-dim state over {times.shape[0] - 1} steps, "
        f"final norm^2 {np.vdot(states[-1], states[-1]).real:.6f}"
    )
    return Trajectory(times, states, psi0.basis_labels, h)

def _check_finite(vector: np.ndarray, index: int):
    if not np.all(np.isfinite(vector)):
        raise NumericalInstabilityError(f"Non-finite amplitude at step {index}", {"step": index})

def _propagate_dense(h: OperatorMatrix, states: np.ndarray, dt: float):
    step_matrix = h.rk4_step_matrix(dt)
    for k in range(1, states.shape[0]):
        states[k] = step_matrix @ states[k - 1]
        _check_finite(states[k], k)

def _propagate_stages(h: Generator, states: np.ndarray, dt: float):
    def rate(vector):
        return -1j * h.apply(vector)

    for k in range(1, states.shape[0]):
        psi = states[k - 1]
        k1 = rate(psi)
        k2 = rate(psi + 0.5 * dt * k1)
        k3 = rate(psi + 0.5 * dt * k2)
        k4 = rate(psi + dt * k3)
        states[k] = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_finite(states[k], k)

def exact_propagate_2level(h: OperatorMatrix, psi0: StateVector, t: float) -> StateVector:
    """
    exp(-i h t)|psi0> for a 2x2 generator.

    Uses the eigendecomposition. Near an exceptional point (eigenvalue gap,
    taken from the discriminant, below DEFECTIVE_TOL * ||h||, or an
    ill-conditioned eigenvector matrix) it switches to the Cayley-Hamilton
    form cos(mu t) - i t sinc(mu t) (h - tr(h)/2), which has no cancellation.
    """
    if h.dimension != 2 or psi0.dimension != 2:
        raise DimensionMismatchError("exact_propagate_2level needs a 2x2 generator and a 2-state vector")
    scale = float(np.linalg.norm(h.entries))
    if scale == 0.0 or t == 0:
        return psi0

    shifted = h.entries - 0.5 * np.trace(h.entries) * np.eye(2)
    gap = 2.0 * abs(np.sqrt(complex(-np.linalg.det(shifted))))
    eigenvalues, eigenvectors = np.linalg.eig(h.entries)
    if gap <= Config.DEFECTIVE_TOL * scale or np.linalg.cond(eigenvectors) > EIGENVECTOR_CONDITION_LIMIT:
        amplitudes = _cayley_hamilton_2level(h.entries, t) @ psi0.amplitudes
    else:
        coefficients = np.linalg.solve(eigenvectors, psi0.amplitudes)
        amplitudes = eigenvectors @ (np.exp(-1j * eigenvalues * t) * coefficients)
    if not np.all(np.isfinite(amplitudes)):
        raise NumericalInstabilityError("Closed-form propagation produced non-finite amplitudes")
    return StateVector(psi0.basis_labels, amplitudes)

def _cayley_hamilton_2level(entries: np.ndarray, t: float) -> np.ndarray:
    mean = 0.5 * np.trace(entries)
    shifted = entries - mean * np.eye(2)
    # shifted^2 = mu^2 * I; cos and sinc are even in mu, so the branch is irrelevant
    mu = np.sqrt(complex(-np.linalg.det(shifted)))
    sin_over_mu = t * np.sinc(mu * t / np.pi)
    return np.exp(-1j * mean * t) * (np.cos(mu * t) * np.eye(2) - 1j * sin_over_mu * shifted)

def convergence_ratio(h: OperatorMatrix, psi0: StateVector, t_final: float, dt: float) -> float:
    """
    err(dt) / err(dt/2) against the closed form; about 16 for a fourth-order
    integrator in its asymptotic regime.
    """
    steps = time_grid(t_final, dt).shape[0] - 1
    reference = exact_propagate_2level(h, psi0, t_final).amplitudes
    coarse = propagate(h, psi0, t_final, t_final / steps).final_state.amplitudes
    fine = propagate(h, psi0, t_final, t_final / (2 * steps)).final_state.amplitudes
    error_fine = np.linalg.norm(fine - reference)
    if error_fine == 0.0:
        raise NumericalInstabilityError("Fine-step error vanished; ratio undefined")
    return float(np.linalg.norm(coarse - reference) / error_fine)
