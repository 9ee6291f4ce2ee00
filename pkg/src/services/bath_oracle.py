"""
Bath Oracle Service
===================

Unitary evolution of system + discretized flat reservoir in the
single-excitation sector. The ground truth for the no-jump reduction:
the no-excitation block of the joint state must follow the conditional
Hamiltonian in the Markovian limit.
"""

from typing import Dict, Optional, Tuple

import numpy as np

from config.config import Config
from ..core.exceptions import InvalidParameterError, RecurrenceHorizonError, DimensionMismatchError
from ..core.models import (
    BathSpec, StateVector, Trajectory, PhaseReport, PhaseMethod,
    DispersiveQubitParams, ModelParams, wrap_phase
)
from ..core.operators import ArrowHamiltonian, BathBlock
from ..core.state import propagate
from ..core.phase import total_phase, dynamical_phase_joint, unwrapped_total_phase
from ..systems import build_system
from ..utils.logger import get_logger

logger = get_logger("BathOracle")

VACUUM = "vac"

def build_flat_bath(target_gamma: float, bandwidth: float, mode_count: int,
                    center: float = 0.0) -> BathSpec:
    """
    Uniform grid of N detunings over [center - W/2, center + W/2] with equal
    couplings g_k = sqrt(gamma * d_omega / 2 pi).

    `center` shifts the band; placing it on the emitting transition removes
    the cutoff-induced level shift.
    """
    if target_gamma < 0:
        raise InvalidParameterError("target_gamma must be non-negative", {"target_gamma": target_gamma})
    if mode_count < Config.MIN_BATH_MODES or mode_count % 2 == 0:
        raise InvalidParameterError(
            f"Bath needs an odd mode count >= {Config.MIN_BATH_MODES}",
            {"mode_count": mode_count}
        )
    if bandwidth < Config.BANDWIDTH_FACTOR * target_gamma or bandwidth <= 0:
        raise InvalidParameterError(
            f"Bandwidth must be at least {Config.BANDWIDTH_FACTOR} x target_gamma",
            {"bandwidth": bandwidth, "target_gamma": target_gamma}
        )

    spacing = bandwidth / (mode_count - 1)
    detunings = center + spacing * (np.arange(mode_count) - (mode_count - 1) // 2)
    couplings = np.full(mode_count, np.sqrt(target_gamma * spacing / (2 * np.pi)))
    spec = BathSpec(detunings, couplings, target_gamma, bandwidth, center)
    logger.debug(
        f"Flat bath: N={mode_count} W={bandwidth} d_omega={spacing:.4g} "
        f"g_k={couplings[0]:.4g} t_max={spec.t_max:.4g}"
    )
    return spec

def _block(label: str, source: int, base_energy: float, spec: BathSpec) -> BathBlock:
    return BathBlock(label, source, base_energy + spec.detunings, spec.couplings)

def joint_hamiltonian(spec: BathSpec, model: ModelParams,
                      photon_spec: Optional[BathSpec] = None) -> ArrowHamiltonian:
    """
    H_sr in the single-excitation sector.

    Dispersive qubit: {|e,vac>, |g,vac>} + |g,1_k>, mode k at E_g + delta_k.
    Vacuum JC: {|e,0,vac>, |g,1,vac>} + |g,0,1_k(a)> fed by |e,0> and
    |g,0,1_k(p)> fed by |g,1>; both lower states sit at energy 0.
    """
    system = build_system(model)
    h_s = system.system_hamiltonian().entries
    labels = system.basis_labels

    if isinstance(model, DispersiveQubitParams):
        blocks = [_block("g|1a", 0, h_s[1, 1].real, spec)]
        excitations = np.array([1.0, 0.0])
    else:
        if model.n != 0:
            raise InvalidParameterError("Bath oracle covers the vacuum JC doublet (n = 0)")
        if photon_spec is None:
            photon_spec = build_flat_bath(model.kappa, spec.bandwidth, spec.mode_count, spec.center)
        blocks = [
            _block("g,0|1a", 0, 0.0, spec),
            _block("g,0|1p", 1, 0.0, photon_spec),
        ]
        excitations = np.array([1.0, 1.0])

    hamiltonian = ArrowHamiltonian(h_s, labels, blocks, excitations)
    if hamiltonian.dimension > Config.MAX_JOINT_DIMENSION:
        raise InvalidParameterError(
            f"Joint dimension {hamiltonian.dimension} exceeds {Config.MAX_JOINT_DIMENSION}"
        )
    return hamiltonian

def vacuum_initial_state(hamiltonian: ArrowHamiltonian, system_amplitudes: np.ndarray) -> StateVector:
    amplitudes = np.zeros(hamiltonian.dimension, dtype=complex)
    amplitudes[:hamiltonian.system_size] = system_amplitudes
    return StateVector(hamiltonian.basis_labels(), amplitudes)

def evolve_joint(spec: BathSpec, model: ModelParams, psi0: Optional[StateVector] = None,
                 T: Optional[float] = None, dt: Optional[float] = None,
                 photon_spec: Optional[BathSpec] = None) -> Trajectory:
    """
    Propagate the joint state with the same RK4 integrator as the state core.

    psi0 defaults to the model's initial state times the reservoir vacuum;
    T defaults to the model's cycle time.
    """
    system = build_system(model)
    T = system.evolution_time if T is None else T
    horizon = spec.t_max if photon_spec is None else min(spec.t_max, photon_spec.t_max)
    if not T < horizon:
        raise RecurrenceHorizonError(
            f"T={T:.4g} reaches the bath recurrence time {horizon:.4g}",
            {"T": T, "t_max": horizon}
        )
    if abs(spec.markovian_rate - model.gamma) > 1e-9 * max(1.0, model.gamma):
        logger.warning(
            f"Bath rate {spec.markovian_rate:.6g} differs from model gamma {model.gamma:.6g}"
        )

    hamiltonian = joint_hamiltonian(spec, model, photon_spec)
    if psi0 is None:
        psi0 = vacuum_initial_state(hamiltonian, system.initial_amplitudes())
    elif psi0.basis_labels != hamiltonian.basis_labels():
        raise DimensionMismatchError("psi0 is not expressed in the joint basis")

    logger.oracle_log(
        f"Evolving joint state: dimension {hamiltonian.dimension}, T={T:.4g}",
        system.kind.value
    )
    return propagate(hamiltonian, psi0, T, dt)

def _system_labels(basis_labels: Tuple[str, ...]) -> Tuple[Tuple[int, ...], Tuple[str, ...]]:
    indices, labels = [], []
    for index, label in enumerate(basis_labels):
        system_part, _, bath_part = label.partition("|")
        if bath_part == VACUUM:
            indices.append(index)
            labels.append(system_part)
    return tuple(indices), tuple(labels)

def project_no_excitation(js: StateVector) -> StateVector:
    """System block with the reservoir in vacuum (unnormalized)"""
    indices, labels = _system_labels(js.basis_labels)
    if not indices:
        raise DimensionMismatchError("State has no reservoir-vacuum block")
    return StateVector(labels, js.amplitudes[list(indices)])

def no_excitation_trajectory(trajectory: Trajectory) -> np.ndarray:
    """No-excitation block amplitudes, one row per time"""
    indices, _ = _system_labels(trajectory.basis_labels)
    return trajectory.states[:, list(indices)]

def excited_block_norms(trajectory: Trajectory) -> np.ndarray:
    """||psi_1(t)||: norm of the one-reservoir-excitation block"""
    indices, _ = _system_labels(trajectory.basis_labels)
    mask = np.ones(len(trajectory.basis_labels), dtype=bool)
    mask[list(indices)] = False
    block = trajectory.states[:, mask]
    return np.sqrt(np.einsum("ti,ti->t", block.conj(), block).real)

def joint_phase_report(traj: Trajectory, h_total: ArrowHamiltonian) -> PhaseReport:
    """
    Phases of the unitary joint evolution.

    phi_d uses the conserved <H_sr>; the total phase is also taken from the
    no-excitation block alone, and the two must agree because the reservoir
    excitation block is orthogonal to the initial vacuum state.
    """
    psi0 = traj.initial_state
    final = traj.final_state
    phi = total_phase(psi0, final)
    phi_d = dynamical_phase_joint(psi0, h_total, traj.t_final)

    block_phase = total_phase(project_no_excitation(psi0), project_no_excitation(final))
    independence = abs(wrap_phase(phi - block_phase))
    if independence > 1e-8:
        logger.warning(f"Joint phase differs from no-excitation block phase by {independence:.2e}")

    norms = traj.norms_squared()
    excitations = h_total.excitation_numbers()
    populations = (np.abs(traj.states) ** 2) @ excitations
    report = PhaseReport(
        total_phase=phi,
        dynamical_phase=phi_d,
        geometric_phase=wrap_phase(phi - phi_d),
        geometric_phase_unwrapped=float(unwrapped_total_phase(traj)[-1]) - phi_d,
        survival_prob=float(np.sum(np.abs(project_no_excitation(final).amplitudes) ** 2)),
        method=PhaseMethod.ORACLE,
        diagnostics={
            "independence_residual": independence,
            "norm_drift": float(np.max(np.abs(norms - 1.0))),
            "excitation_drift": float(np.max(np.abs(populations - populations[0]))),
        }
    )
    logger.oracle_log(
        f"beta={report.geometric_phase:.6f} norm drift={report.diagnostics['norm_drift']:.2e}"
    )
    return report

def markovian_deviation(traj: Trajectory, model: ModelParams,
                        window: Tuple[float, float] = (0.5, 3.0)) -> float:
    """
    max |c_oracle(t) - c_markov(t)| / |c_markov(0)| over the first system
    amplitude for t in `window`. The start of the window skips the short
    non-exponential transient of a finite band.
    """
    reference = build_system(model).amplitudes(traj.times)[:, 0]
    oracle = no_excitation_trajectory(traj)[:, 0]
    mask = (traj.times >= window[0]) & (traj.times <= window[1])
    if not np.any(mask):
        raise InvalidParameterError("Comparison window holds no grid points", {"window": window})
    scale = abs(reference[0])
    if scale == 0.0:
        raise InvalidParameterError("Reference amplitude vanishes at t = 0")
    return float(np.max(np.abs(oracle[mask] - reference[mask])) / scale)

def excited_block_deviation(traj: Trajectory, model: DispersiveQubitParams,
                            window: Tuple[float, float] = (0.5, 3.0)) -> float:
    """
    Relative deviation of ||psi_1(t)|| from sqrt(1 - exp(-gamma t)) cos(theta/2)
    for the dispersive qubit, normalized by cos(theta/2).
    """
    scale = np.cos(0.5 * model.theta)
    if scale == 0.0:
        raise InvalidParameterError("Excited component vanishes for theta = pi")
    expected = np.sqrt(1.0 - np.exp(-model.gamma * traj.times)) * scale
    measured = excited_block_norms(traj)
    mask = (traj.times >= window[0]) & (traj.times <= window[1])
    return float(np.max(np.abs(measured[mask] - expected[mask])) / scale)

def oracle_summary(traj: Trajectory, h_total: ArrowHamiltonian, model: ModelParams) -> Dict[str, float]:
    report = joint_phase_report(traj, h_total)
    system_beta = build_system(model).beta_exact(traj.t_final)
    return {
        "beta_oracle": report.geometric_phase,
        "beta_system": system_beta,
        "beta_relative_error": abs(wrap_phase(report.geometric_phase - system_beta)) / max(abs(system_beta), 1e-300),
        **report.diagnostics
    }
