"""
Phase engine
============

Total phase, dynamical phase (joint-state and quantum-jump conventions),
geometric phase, continuity-unwrapped phase and the parallel-transport check.
All angles are radians; principal values lie in (-pi, pi].
"""

from typing import Dict, Iterable, Optional

import numpy as np
from scipy.integrate import simpson, cumulative_simpson

from config.config import Config
from .exceptions import (
    DimensionMismatchError, InvalidParameterError,
    NumericalInstabilityError, OrthogonalStatesError
)
from .models import StateVector, Trajectory, PhaseReport, PhaseMethod, wrap_phase
from .operators import DecayChannel
from ..utils.logger import get_logger

logger = get_logger("PhaseEngine")

def total_phase(psi_initial: StateVector, psi_final: StateVector,
                overlap_floor: Optional[float] = None) -> float:
    """arg <psi_initial|psi_final>, principal value"""
    floor = Config.OVERLAP_FLOOR if overlap_floor is None else overlap_floor
    overlap = psi_initial.overlap(psi_final)
    if abs(overlap) <= floor:
        raise OrthogonalStatesError(abs(overlap), floor)
    return wrap_phase(np.angle(overlap))

def _require_hermitian(h_s):
    if not h_s.is_hermitian():
        raise InvalidParameterError("Dynamical phase needs the Hermitian system Hamiltonian")

def dynamical_phase_joint(psi0: StateVector, h_s, t_final: float) -> float:
    """
    -<psi0|H_s|psi0> T. Hamiltonian evolution of the closed system+reservoir
    preserves <H>, so the initial expectation fixes the whole dynamical phase.
    """
    _require_hermitian(h_s)
    if h_s.dimension != psi0.dimension:
        raise DimensionMismatchError("Hamiltonian and state dimensions differ")
    return float(-h_s.expectation(psi0.amplitudes).real * t_final)

def _normalized_energy(trajectory: Trajectory, h_s) -> np.ndarray:
    if h_s.dimension != len(trajectory.basis_labels):
        raise DimensionMismatchError("Hamiltonian and trajectory dimensions differ")
    norms = trajectory.norms_squared()
    if np.any(norms <= np.finfo(float).tiny):
        raise NumericalInstabilityError("Trajectory norm vanished; normalized energy undefined")
    return h_s.expectation_many(trajectory.states).real / norms

def dynamical_phase_jump(trajectory: Trajectory, h_s) -> float:
    """-integral of <psi|H_s|psi>/<psi|psi> along a no-jump trajectory (Simpson)"""
    _require_hermitian(h_s)
    if len(trajectory) < 2:
        return 0.0
    energy = _normalized_energy(trajectory, h_s)
    return float(-simpson(energy, x=trajectory.times))

def running_dynamical_phase(trajectory: Trajectory, h_s) -> np.ndarray:
    """phi_d(t_k) = -integral_0^t_k <H>/<psi|psi>, for every grid time"""
    energy = _normalized_energy(trajectory, h_s)
    if len(trajectory) < 3:
        increments = 0.5 * (energy[1:] + energy[:-1]) * np.diff(trajectory.times)
        return -np.concatenate([[0.0], np.cumsum(increments)])
    return -cumulative_simpson(energy, x=trajectory.times, initial=0.0)

def unwrapped_total_phase(trajectory: Trajectory) -> np.ndarray:
    """
    arg <psi(0)|psi(t_k)> unwrapped by continuity along the grid.
    Entries from the first near-orthogonal point onward are NaN: the path
    crossed a node and continuity no longer fixes the branch.
    """
    overlaps = trajectory.overlaps_with_initial()
    unwrapped = np.unwrap(np.angle(overlaps))
    nodes = np.flatnonzero(np.abs(overlaps) <= Config.OVERLAP_FLOOR)
    if nodes.size:
        unwrapped[nodes[0]:] = np.nan
    return unwrapped

def geometric_phase(trajectory: Trajectory, h_s, method: PhaseMethod) -> PhaseReport:
    """
    beta = phi - phi_d for the chosen dynamical-phase convention.

    The unwrapped value follows the total phase continuously along the grid
    and may leave (-pi, pi]; it is NaN when the path passes through a node.
    """
    psi0 = trajectory.initial_state
    phi = total_phase(psi0, trajectory.final_state)

    if method is PhaseMethod.QUANTUM_JUMP:
        phi_d = dynamical_phase_jump(trajectory, h_s)
    elif method in (PhaseMethod.JOINT_STATE, PhaseMethod.ORACLE):
        phi_d = dynamical_phase_joint(psi0, h_s, trajectory.t_final)
    else:
        raise InvalidParameterError(f"Unknown phase method {method!r}")

    phi_unwrapped = float(unwrapped_total_phase(trajectory)[-1])
    min_overlap = float(np.min(np.abs(trajectory.overlaps_with_initial())))
    report = PhaseReport(
        total_phase=phi,
        dynamical_phase=phi_d,
        geometric_phase=wrap_phase(phi - phi_d),
        geometric_phase_unwrapped=phi_unwrapped - phi_d,
        survival_prob=trajectory.survival_probability,
        method=method,
        diagnostics={"min_overlap": min_overlap}
    )
    logger.phase_log(
        f"phi={phi:.6f} phi_d={phi_d:.6f} beta={report.geometric_phase:.6f} "
        f"P_s={report.survival_prob:.6f}",
        method.value
    )
    return report

def parallel_transport_residual(joint_trajectory: Trajectory, h_total,
                                remove_dynamical: bool = True) -> float:
    """
    max_t |<Phi(t)|dPhi/dt>| with Phi = exp(-i phi_d(t)) psi(t), using centered
    differences on interior grid points. With remove_dynamical=False the raw
    state is used, so the residual is about |<H>|.
    """
    if len(joint_trajectory) < 3:
        raise InvalidParameterError("Parallel-transport check needs at least three grid points")
    norms = joint_trajectory.norms_squared()
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > 1e-6:
        logger.warning(f"Parallel-transport check on a non-unitary trajectory (norm drift {drift:.2e})")

    states = joint_trajectory.states
    if remove_dynamical:
        phi_d = running_dynamical_phase(joint_trajectory, h_total)
        states = states * np.exp(-1j * phi_d)[:, None]
    times = joint_trajectory.times
    derivative = (states[2:] - states[:-2]) / (times[2:] - times[:-2])[:, None]
    connection = np.einsum("ti,ti->t", states[1:-1].conj(), derivative)
    return float(np.max(np.abs(connection)))

def leakage_populations(trajectory: Trajectory, channels: Iterable[DecayChannel]) -> Dict[str, float]:
    """
    Population routed into each jump channel up to t_final:
    integral of gamma_c ||o_c psi(t)||^2 dt, plus the surviving norm.
    """
    populations = {}
    for channel in channels:
        if channel.dimension != len(trajectory.basis_labels):
            raise DimensionMismatchError(f"Channel '{channel.label}' does not act on this trajectory")
        rates = channel.jump_rates(trajectory.states)
        populations[channel.label] = float(simpson(rates, x=trajectory.times)) if len(trajectory) > 1 else 0.0
    populations["no_jump"] = trajectory.survival_probability
    return populations
