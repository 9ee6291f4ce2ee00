"""
Interferometry Service
======================

Ramsey-type protocols that turn the geometric phase into a detection
probability, and the inversion back to cos(beta).

Each protocol is computed twice: from the closed visibility formula and by an
explicit simulation. The simulation keeps one amplitude table per
environment sector (no jump, atom decayed into a given lower level, photon
lost from a given branch). Sectors are mutually orthogonal, so only their
populations add; inside a sector amplitudes interfere under the final atomic
rotation.
"""

from collections import defaultdict
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.config import Config
from ..core.exceptions import InvalidParameterError
from ..core.models import JCParams, RamseyOutcome, RamseyProtocol
from ..core.operators import DecayChannel
from ..core.phase import leakage_populations, dynamical_phase_jump, dynamical_phase_joint
from ..systems.jaynes_cummings import JaynesCummings
from ..systems.dissipative_jc import DissipativeJC
from ..utils.logger import get_logger

logger = get_logger("Interferometry")

SQRT_HALF = np.sqrt(0.5)

# |e> -> (|e> + |g>)/sqrt2, |g> -> (|g> - |e>)/sqrt2
PG_ROTATION = {"e": {"e": SQRT_HALF, "g": SQRT_HALF}, "g": {"g": SQRT_HALF, "e": -SQRT_HALF}}
# |e> -> (|e> + |f>)/sqrt2, |f> -> (|f> - |e>)/sqrt2
PF_ROTATION = {"e": {"e": SQRT_HALF, "f": SQRT_HALF}, "f": {"f": SQRT_HALF, "e": -SQRT_HALF}}

class SectorBook:
    """Amplitudes keyed by (atomic level, photon number) inside each environment sector"""

    def __init__(self):
        self.sectors: Dict[str, Dict[Tuple[str, int], complex]] = defaultdict(dict)

    def add(self, sector: str, level: str, photons: int, amplitude: complex):
        if photons < 0 or amplitude == 0:
            return
        key = (level, photons)
        self.sectors[sector][key] = self.sectors[sector].get(key, 0.0) + amplitude

    def add_population(self, sector: str, level: str, photons: int, population: float):
        # a sector reached by one jump holds a single pure component
        self.add(sector, level, photons, np.sqrt(max(population, 0.0)))

    def rotate(self, rotation: Dict[str, Dict[str, float]]):
        for name, table in self.sectors.items():
            rotated: Dict[Tuple[str, int], complex] = {}
            for (level, photons), amplitude in table.items():
                for target, coefficient in rotation.get(level, {level: 1.0}).items():
                    key = (target, photons)
                    rotated[key] = rotated.get(key, 0.0) + coefficient * amplitude
            self.sectors[name] = rotated

    def populations(self) -> Dict[str, float]:
        return {name: float(sum(abs(a) ** 2 for a in table.values()))
                for name, table in self.sectors.items()}

    def level_population(self, level: str) -> float:
        return float(sum(abs(amplitude) ** 2
                         for table in self.sectors.values()
                         for (lvl, _), amplitude in table.items() if lvl == level))


def _visibility_factors(p: JCParams) -> Dict[str, float]:
    """u_n, v_n, xi_n, p_n, q_n, s_n for the doublet at T = pi/Omega_n"""
    theta = p.theta_n
    T = p.rabi_time
    cos_sq, sin_sq = np.cos(theta) ** 2, np.sin(theta) ** 2
    n, gamma, kappa = p.n, p.gamma, p.kappa

    u = 1.0 - 0.25 * ((2 * n + 1) * kappa + gamma + (gamma - kappa) * cos_sq) * T
    v = 0.125 * (gamma - kappa) * T * np.sin(2 * theta)
    residual = 1.0 - u ** 2 - v ** 2
    if residual < -1e-15:
        raise InvalidParameterError(
            "Visibility factors leave the physical range (u^2 + v^2 > 1)",
            {"u": u, "v": v}
        )
    xi = np.sqrt(max(residual, 0.0)) * SQRT_HALF

    denominator = gamma * (1 + cos_sq) + kappa * (2 * n + sin_sq)
    if denominator > 0:
        p_n = np.sqrt(gamma * (1 + cos_sq) / denominator)
        q_n = np.sqrt(n * kappa * (1 + cos_sq) / denominator)
        s_n = np.sqrt((n + 1) * kappa * sin_sq / denominator)
    else:
        p_n = q_n = s_n = 0.0
    return {"u": float(u), "v": float(v), "xi": float(xi),
            "p": float(p_n), "q": float(q_n), "s": float(s_n)}

def _require_visibility(u: float):
    if u <= Config.OVERLAP_FLOOR:
        raise InvalidParameterError("Visibility collapse: u at or below the overlap floor", {"u": u})

def _invert(offset_removed: float, visibility: float) -> Tuple[float, float, Tuple[str, ...]]:
    cos_beta = offset_removed / visibility
    flags: Tuple[str, ...] = ()
    if abs(cos_beta) > 1.0:
        flags = ("inversion_clipped",)
        logger.warning(f"Recovered cos(beta)={cos_beta:.6f} outside [-1, 1]; clipped")
        cos_beta = float(np.clip(cos_beta, -1.0, 1.0))
    return float(cos_beta), float(np.arccos(cos_beta)), flags

def _channel_weights(system: JaynesCummings, dt: Optional[float]) -> Tuple[np.ndarray, Dict[str, float]]:
    """Final no-jump amplitudes and integrated jump populations per branch"""
    p = system.params
    trajectory = system.closed_form_trajectory(p.rabi_time, dt)
    channels: List[DecayChannel] = [
        DecayChannel("atom", [[1.0, 0.0]], p.gamma),
        DecayChannel("photon_e", [[np.sqrt(p.n), 0.0]], p.kappa),
        DecayChannel("photon_g", [[0.0, np.sqrt(p.n + 1)]], p.kappa),
    ]
    weights = leakage_populations(trajectory, channels)
    return trajectory.states[-1], weights

def ramsey_pg(p: JCParams, dt: Optional[float] = None) -> RamseyOutcome:
    """Single decay channel: detect |g> after one Rabi cycle and the e/g rotation"""
    if p.n != 0 or p.kappa != 0:
        raise InvalidParameterError("ramsey_pg needs the vacuum doublet (n = 0, kappa = 0)")
    return _ramsey_lower_level(p, gamma_g=p.gamma, dt=dt, protocol=RamseyProtocol.QUBIT_PG)

def ramsey_pg_multichannel(p: JCParams, gamma_g: float, dt: Optional[float] = None) -> RamseyOutcome:
    """
    Atom decays to |g> at rate gamma_g and to other lower levels at
    gamma - gamma_g; only |g> takes part in the rotation.
    """
    if p.n != 0 or p.kappa != 0:
        raise InvalidParameterError("ramsey_pg_multichannel needs the vacuum doublet (n = 0, kappa = 0)")
    if not 0.0 <= gamma_g <= p.gamma:
        raise InvalidParameterError("gamma_g must lie in [0, gamma]", {"gamma_g": gamma_g, "gamma": p.gamma})
    return _ramsey_lower_level(p, gamma_g=gamma_g, dt=dt, protocol=RamseyProtocol.MULTI_CHANNEL_PG)

def _ramsey_lower_level(p: JCParams, gamma_g: float, dt: Optional[float],
                        protocol: RamseyProtocol) -> RamseyOutcome:
    factors = _visibility_factors(p)
    u, v = factors["u"], factors["v"]
    _require_visibility(u)
    ratio = gamma_g / p.gamma if p.gamma > 0 else 1.0
    factors["gamma_g_ratio"] = ratio

    system = JaynesCummings(p)
    beta = system.beta_exact()
    offset = 0.25 * ((1 + ratio) + (u ** 2 + v ** 2) * (1 - ratio))
    p_formula = offset + 0.5 * u * np.cos(beta)

    final, weights = _channel_weights(system, dt)
    book = SectorBook()
    book.add("no_jump", "e", 0, SQRT_HALF * final[0])
    book.add("no_jump", "g", 1, SQRT_HALF * final[1])
    book.add("no_jump", "g", 0, SQRT_HALF)
    book.add_population("atom_to_g", "g", 0, 0.5 * ratio * weights["atom"])
    book.add_population("atom_to_other", "h", 0, 0.5 * (1 - ratio) * weights["atom"])
    book.rotate(PG_ROTATION)

    p_detect = book.level_population("g")
    cos_beta, beta_recovered, flags = _invert(p_detect - offset, 0.5 * u)
    outcome = RamseyOutcome(
        protocol=protocol,
        p_detect=p_detect,
        p_formula=float(p_formula),
        factors=factors,
        beta_reference=beta,
        beta_recovered=beta_recovered,
        cos_beta_recovered=cos_beta,
        sector_populations=book.populations(),
        warning_flags=flags
    )
    logger.debug(f"{protocol.value}: P_sim={p_detect:.6f} P_formula={p_formula:.6f}")
    return outcome

def ramsey_pf_fock(p: JCParams, dt: Optional[float] = None,
                   guard_limit: Optional[float] = None) -> RamseyOutcome:
    """
    Fock-state protocol with the auxiliary level |f> (uncoupled to the cavity).
    Atomic decay splits gamma/2 into |g> and gamma/2 into |f>.
    """
    limit = Config.GUARD_RATIO if guard_limit is None else guard_limit
    ratio = max(p.gamma, (p.n + 1) * p.kappa) / p.omega_n
    if ratio > limit:
        raise InvalidParameterError(
            f"Perturbative guard violated: rate/Omega_n = {ratio:.3f} > {limit}",
            {"ratio": ratio}
        )
    factors = _visibility_factors(p)
    u, xi = factors["u"], factors["xi"]
    _require_visibility(u)
    T = p.rabi_time
    f_decay = np.exp(-0.5 * p.n * p.kappa * T)

    system = DissipativeJC(p, include_common_phase=False)
    beta = system.beta_exact()
    offset = 0.25 * (1 + u ** 2 + xi ** 2 * (factors["p"] ** 2 + 2 * factors["q"] ** 2))
    p_formula = offset + 0.5 * u * f_decay * np.cos(beta)

    final, weights = _channel_weights(system, dt)
    n = p.n
    book = SectorBook()
    book.add("no_jump", "e", n, SQRT_HALF * final[0])
    book.add("no_jump", "g", n + 1, SQRT_HALF * final[1])
    book.add("no_jump", "f", n, SQRT_HALF * f_decay)
    book.add_population("atom_to_g", "g", n, 0.25 * weights["atom"])
    book.add_population("atom_to_f", "f", n, 0.25 * weights["atom"])
    book.add_population("photon_from_e", "e", n - 1, 0.5 * weights["photon_e"])
    book.add_population("photon_from_g", "g", n, 0.5 * weights["photon_g"])
    book.add_population("photon_from_f", "f", n - 1, 0.5 * (1.0 - f_decay ** 2))
    book.rotate(PF_ROTATION)

    p_detect = book.level_population("f")
    cos_beta, beta_recovered, flags = _invert(p_detect - offset, 0.5 * u * f_decay)
    return RamseyOutcome(
        protocol=RamseyProtocol.FOCK_PF,
        p_detect=p_detect,
        p_formula=float(p_formula),
        factors=factors,
        beta_reference=beta,
        beta_recovered=beta_recovered,
        cos_beta_recovered=cos_beta,
        sector_populations=book.populations(),
        warning_flags=flags
    )

def previous_method_dynamical_contamination(p: JCParams, guard_limit: Optional[float] = None) -> float:
    """
    First-order dynamical phase picked up by the normalized-state convention at
    T = pi/Omega_n; the joint-state dynamical phase of |e,n> carries none of it.
    """
    system = DissipativeJC(p)
    system.guard_flags(system.guard_ratio(), "rate_over_omega", guard_limit)
    return system.dynamical_contamination()

def measured_dynamical_contamination(p: JCParams, dt: Optional[float] = None) -> float:
    """phi_d(quantum-jump) - phi_d(joint-state) on the closed-form no-jump trajectory"""
    system = DissipativeJC(p)
    trajectory = system.closed_form_trajectory(p.rabi_time, dt)
    h_s = system.system_hamiltonian()
    return (dynamical_phase_jump(trajectory, h_s)
            - dynamical_phase_joint(trajectory.initial_state, h_s, trajectory.t_final))
