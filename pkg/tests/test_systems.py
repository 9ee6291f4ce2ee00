"""
Model tests: closed forms, exact phases, perturbative expansions, dressed states.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from src.core.exceptions import InvalidParameterError, GuardViolationWarning
from src.core.models import DispersiveQubitParams, JCParams, PhaseMethod, wrap_phase
from src.core.state import exact_propagate_2level
from src.systems import build_system, DispersiveQubit, JaynesCummings, DissipativeJC
from src.systems.dispersive_qubit import (
    dispersive_state, dispersive_beta_cyclic, dispersive_beta_exact, dispersive_solid_angle
)
from src.systems.jaynes_cummings import (
    jc_state, jc_beta_exact, jc_lambda_expansion, dressed_decomposition, dressed_joint_amplitude
)
from src.systems.dissipative_jc import (
    dissipative_jc_state, dissipative_jc_beta_exact, dynamical_contamination
)
from src.services.interferometry import measured_dynamical_contamination


jc_parameters = st.builds(
    JCParams,
    g=st.floats(min_value=0.2, max_value=2.0),
    delta=st.floats(min_value=-2.0, max_value=2.0),
    gamma=st.floats(min_value=0.0, max_value=1.0),
    kappa=st.floats(min_value=0.0, max_value=0.5),
    n=st.integers(min_value=0, max_value=3)
)


class TestDispersiveQubit:

    def test_closed_form_amplitudes(self):
        p = DispersiveQubitParams(B=1.3, gamma=0.2, theta=0.7, T=3.0)
        t = 1.1
        state = dispersive_state(p, t)
        expected = [np.cos(0.35) * np.exp(-0.1 * t - 0.65j * t), np.sin(0.35) * np.exp(0.65j * t)]
        assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_time_outside_cycle(self):
        p = DispersiveQubitParams(B=1.0, gamma=0.0, theta=0.7, T=1.0)
        with pytest.raises(InvalidParameterError):
            dispersive_state(p, 1.5)

    def test_parameter_domain(self):
        with pytest.raises(InvalidParameterError):
            DispersiveQubitParams(B=1.0, gamma=-0.1, theta=0.5, T=1.0)
        with pytest.raises(InvalidParameterError):
            DispersiveQubitParams(B=1.0, gamma=0.1, theta=4.0, T=1.0)
        with pytest.raises(InvalidParameterError):
            DispersiveQubitParams(B=0.0, gamma=0.1, theta=0.5, T=1.0)

    def test_cyclic_phase_and_solid_angle(self):
        p = DispersiveQubitParams.cyclic(B=2.0, gamma=0.3, theta=np.pi / 2)
        assert dispersive_beta_cyclic(p) == pytest.approx(-np.pi)
        assert dispersive_beta_cyclic(p, principal=True) == pytest.approx(np.pi)
        assert dispersive_solid_angle(p) == pytest.approx(2 * np.pi)
        assert dispersive_beta_cyclic(p) == pytest.approx(-0.5 * dispersive_solid_angle(p))

    def test_cyclic_formula_needs_full_cycle(self):
        with pytest.raises(InvalidParameterError):
            dispersive_beta_cyclic(DispersiveQubitParams(B=1.0, gamma=0.0, theta=0.5, T=2.0))

    @pytest.mark.parametrize("gamma", [0.0, 0.3, 2.0])
    def test_exact_phase_matches_cyclic_formula(self, gamma):
        p = DispersiveQubitParams.cyclic(B=1.0, gamma=gamma, theta=2.0)
        assert abs(wrap_phase(dispersive_beta_exact(p) - dispersive_beta_cyclic(p))) < 1e-12

    def test_exact_phase_off_cycle(self):
        p = DispersiveQubitParams(B=1.0, gamma=0.0, theta=np.pi / 3, T=2.0)
        c_sq, s_sq = 0.75, 0.25
        phi = np.angle(c_sq * np.exp(-1j) + s_sq * np.exp(1j))
        expected = wrap_phase(phi + 0.5 * np.cos(np.pi / 3) * 2.0)
        assert dispersive_beta_exact(p) == pytest.approx(expected, abs=1e-12)

    def test_integrator_matches_closed_form(self, cyclic_qubit):
        system = DispersiveQubit(cyclic_qubit)
        trajectory = system.integrate(dt=1e-3)
        assert_allclose(trajectory.states, system.amplitudes(trajectory.times), atol=1e-8)


class TestJaynesCummings:

    def test_starts_in_excited_state(self, vacuum_jc):
        assert_allclose(jc_state(vacuum_jc, 0.0).amplitudes, [1.0, 0.0])

    def test_resonant_rabi_cycle(self):
        p = JCParams(g=1.0, delta=0.0)
        assert_allclose(jc_state(p, np.pi / 2).amplitudes, [0.0, -1.0j], atol=1e-15)
        assert jc_beta_exact(p) == pytest.approx(np.pi)

    def test_vacuum_entry_points_reject_fock_states(self):
        with pytest.raises(InvalidParameterError):
            jc_state(JCParams(g=1.0, delta=0.5, n=1), 0.1)
        with pytest.raises(InvalidParameterError):
            jc_beta_exact(JCParams(g=1.0, delta=0.5, kappa=0.1))

    @pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, -0.8])
    def test_no_decay_baseline(self, delta):
        p = JCParams(g=1.0, delta=delta)
        system = JaynesCummings(p)
        assert abs(wrap_phase(system.beta_exact() - system.beta_zero())) < 1e-10

    def test_integrator_matches_closed_form(self, vacuum_jc):
        system = JaynesCummings(vacuum_jc)
        trajectory = system.integrate(dt=1e-3)
        assert_allclose(trajectory.states, system.amplitudes(trajectory.times), atol=1e-8)

    def test_exceptional_point_closed_form(self):
        # delta = 0, gamma = 4g: lambda = 0 and the amplitudes stay regular
        system = JaynesCummings(JCParams(g=1.0, delta=0.0, gamma=4.0))
        assert abs(system.complex_rabi_frequency()) < 1e-12
        t = 0.9
        exact = exact_propagate_2level(system.conditional_hamiltonian(), system.initial_state(), t)
        assert_allclose(system.state(t).amplitudes, exact.amplitudes, atol=1e-12)

    def test_lambda_expansion(self):
        p = JCParams(g=1.0, delta=0.5, gamma=0.05)
        result = jc_lambda_expansion(p)
        assert abs(result.lambda_approx - JaynesCummings(p).complex_rabi_frequency()) < 1e-6
        assert not result.flagged

    def test_second_order_phase_coefficient(self):
        p = JCParams(g=1.0, delta=1.0, gamma=0.01)
        system = JaynesCummings(p)
        shift = wrap_phase(system.beta_exact() - system.beta_zero())
        expected = system.lambda_expansion().beta_approx - system.beta_zero()
        assert shift == pytest.approx(expected, rel=0.1)

    def test_guard_violation_warns(self):
        system = JaynesCummings(JCParams(g=1.0, delta=0.0, gamma=1.0))
        with pytest.warns(GuardViolationWarning):
            result = system.lambda_expansion()
        assert result.warning_flags == ("guard:rate_over_omega",)
        assert result.ratio == pytest.approx(1.0)

    def test_guard_limit_is_configurable(self):
        p = JCParams(g=1.0, delta=0.5, gamma=0.05)
        with pytest.warns(GuardViolationWarning):
            strict = jc_lambda_expansion(p, guard_limit=0.01)
        assert strict.warning_flags == ("guard:rate_over_omega",)
        assert jc_lambda_expansion(p, guard_limit=0.9).warning_flags == ()

    def test_parameter_domain(self):
        with pytest.raises(InvalidParameterError):
            JCParams(g=0.0, delta=0.5)
        with pytest.raises(InvalidParameterError):
            JCParams(g=1.0, delta=0.5, n=-1)
        with pytest.raises(InvalidParameterError):
            JCParams(g=1.0, delta=0.5, kappa=-0.1)


class TestDressedStates:

    def test_eigenvectors_of_system_hamiltonian(self):
        p = JCParams(g=1.3, delta=0.7, gamma=0.1)
        dressed = dressed_decomposition(p)
        h = JaynesCummings(p).system_hamiltonian().entries
        assert_allclose(h @ dressed.plus_state.amplitudes,
                        dressed.plus_energy * dressed.plus_state.amplitudes, atol=1e-12)
        assert_allclose(h @ dressed.minus_state.amplitudes,
                        dressed.minus_energy * dressed.minus_state.amplitudes, atol=1e-12)

    def test_rates_share_the_total(self):
        dressed = dressed_decomposition(JCParams(g=1.0, delta=0.4, gamma=0.1, kappa=0.04))
        assert dressed.gamma_plus + dressed.gamma_minus == pytest.approx(0.14)

    def test_resonance_splits_evenly(self):
        dressed = dressed_decomposition(JCParams(g=1.0, delta=0.0, gamma=0.2))
        assert dressed.gamma_plus == pytest.approx(0.1)
        assert dressed.gamma_minus == pytest.approx(0.1)

    def test_vacuum_doublet_only(self):
        with pytest.raises(InvalidParameterError):
            dressed_decomposition(JCParams(g=1.0, delta=0.4, n=2))

    def test_dressed_amplitude_fidelity(self):
        p = JCParams(g=1.0, delta=0.6, gamma=0.01)
        assert_allclose(dressed_joint_amplitude(p, 0.0).amplitudes, [1.0, 0.0], atol=1e-15)
        t = p.rabi_time
        approx = dressed_joint_amplitude(p, t)
        exact = jc_state(p, t)
        fidelity = abs(approx.overlap(exact)) / np.sqrt(approx.norm_squared() * exact.norm_squared())
        assert fidelity > 1 - 1e-3


class TestDissipativeJC:

    def test_build_system_picks_model(self, cyclic_qubit, vacuum_jc, fock_jc):
        assert isinstance(build_system(cyclic_qubit), DispersiveQubit)
        assert type(build_system(vacuum_jc)) is JaynesCummings
        assert isinstance(build_system(fock_jc), DissipativeJC)

    def test_fock_basis_labels(self, fock_jc):
        assert DissipativeJC(fock_jc).basis_labels == ("e,1", "g,2")

    def test_integrator_matches_closed_form(self):
        system = DissipativeJC(JCParams(g=1.0, delta=1.0, gamma=0.1, kappa=0.05, n=2))
        trajectory = system.integrate(dt=1e-3)
        assert_allclose(trajectory.states, system.amplitudes(trajectory.times), atol=1e-8)

    def test_common_phase_stripping(self, fock_jc):
        t = 0.8
        full = dissipative_jc_state(fock_jc, t)
        stripped = dissipative_jc_state(fock_jc, t, include_common_phase=False)
        assert_allclose(stripped.amplitudes, full.amplitudes * np.exp(1j * fock_jc.delta * t), atol=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_no_decay_baseline(self, n):
        p = JCParams(g=1.0, delta=0.5, n=n)
        assert abs(wrap_phase(dissipative_jc_beta_exact(p) - DissipativeJC(p).beta_zero())) < 1e-10

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_balanced_loss_keeps_baseline(self, n):
        p = JCParams(g=1.0, delta=1.0, gamma=0.1, kappa=0.1, n=n)
        beta_zero = DissipativeJC(p).beta_zero()
        assert abs(wrap_phase(dissipative_jc_beta_exact(p) - beta_zero)) / beta_zero < 1e-3

    def test_contamination_formula(self):
        p = JCParams(g=1.0, delta=0.5, gamma=0.02, kappa=0.01)
        measured = measured_dynamical_contamination(p, dt=1e-3)
        assert measured == pytest.approx(dynamical_contamination(p), rel=0.05)

    def test_contamination_vanishes_on_resonance(self):
        assert dynamical_contamination(JCParams(g=1.0, delta=0.0, gamma=0.1)) == 0.0


class TestDoubletProperties:

    @given(params=jc_parameters)
    @settings(max_examples=100, deadline=None)
    def test_branch_choice_is_irrelevant(self, params):
        system = DissipativeJC(params)
        times = np.linspace(0.0, params.rabi_time, 32)
        assert_allclose(system.amplitudes(times, branch=1), system.amplitudes(times, branch=-1),
                        atol=1e-12)

    @given(params=jc_parameters)
    @settings(max_examples=100, deadline=None)
    def test_norm_decreases(self, params):
        system = DissipativeJC(params)
        times = np.linspace(0.0, params.rabi_time, 64)
        norms = np.sum(np.abs(system.amplitudes(times)) ** 2, axis=1)
        assert np.all(np.diff(norms) <= 1e-12)

    @given(params=jc_parameters)
    @settings(max_examples=50, deadline=None)
    def test_closed_form_solves_generator(self, params):
        system = DissipativeJC(params)
        t = 0.5 * params.rabi_time
        exact = exact_propagate_2level(system.conditional_hamiltonian(), system.initial_state(), t)
        assert_allclose(system.state(t).amplitudes, exact.amplitudes, atol=1e-8)

    @given(
        g=st.floats(min_value=0.2, max_value=2.0),
        delta=st.floats(min_value=-2.0, max_value=2.0)
    )
    @settings(max_examples=50, deadline=None)
    def test_dressed_basis_is_complete(self, g, delta):
        dressed = dressed_decomposition(JCParams(g=g, delta=delta))
        projector = (np.outer(dressed.plus_state.amplitudes, dressed.plus_state.amplitudes.conj())
                     + np.outer(dressed.minus_state.amplitudes, dressed.minus_state.amplitudes.conj()))
        assert_allclose(projector, np.eye(2), atol=1e-12)


class TestPhaseReports:

    def test_methods_share_trajectory(self):
        system = JaynesCummings(JCParams(g=1.0, delta=0.5, gamma=0.01))
        trajectory = system.integrate(dt=1e-3)
        joint = system.phase_report(PhaseMethod.JOINT_STATE, trajectory=trajectory)
        jump = system.phase_report(PhaseMethod.QUANTUM_JUMP, trajectory=trajectory)
        assert joint.total_phase == jump.total_phase
        assert joint.dynamical_phase == 0.0
        contamination = jump.dynamical_phase - joint.dynamical_phase
        assert contamination == pytest.approx(system.dynamical_contamination(), rel=0.1)
