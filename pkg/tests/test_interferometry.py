"""
Interferometry tests: Ramsey protocols, sector bookkeeping, phase recovery.
"""

import numpy as np
import pytest

from src.core.exceptions import InvalidParameterError, GuardViolationWarning
from src.core.models import JCParams, RamseyProtocol
from src.services.interferometry import (
    SectorBook, PG_ROTATION, PF_ROTATION, _invert,
    ramsey_pg, ramsey_pg_multichannel, ramsey_pf_fock,
    previous_method_dynamical_contamination, measured_dynamical_contamination
)
from src.systems.dissipative_jc import dynamical_contamination


class TestSectorBook:

    def test_rotation_keeps_sector_populations(self):
        book = SectorBook()
        book.add("no_jump", "e", 0, 0.6)
        book.add("no_jump", "g", 0, 0.3j)
        book.add_population("atom", "g", 0, 0.55)
        before = book.populations()
        book.rotate(PG_ROTATION)
        after = book.populations()
        assert after["no_jump"] == pytest.approx(before["no_jump"])
        assert after["atom"] == pytest.approx(0.55)

    def test_amplitudes_interfere_inside_a_sector(self):
        book = SectorBook()
        book.add("no_jump", "e", 0, np.sqrt(0.5))
        book.add("no_jump", "g", 0, np.sqrt(0.5))
        book.rotate(PG_ROTATION)
        # (|e> + |g>)/sqrt2 -> |g>
        assert book.level_population("g") == pytest.approx(1.0)
        assert book.level_population("e") == pytest.approx(0.0, abs=1e-15)

    def test_levels_outside_rotation_are_untouched(self):
        book = SectorBook()
        book.add("atom_to_other", "h", 0, 1.0)
        book.rotate(PF_ROTATION)
        assert book.level_population("h") == pytest.approx(1.0)

    def test_negative_photon_number_is_dropped(self):
        book = SectorBook()
        book.add("photon", "e", -1, 1.0)
        assert book.populations() == {}


class TestQubitProtocol:

    def test_no_decay_fringe(self):
        outcome = ramsey_pg(JCParams(g=1.0, delta=0.5))
        assert outcome.protocol is RamseyProtocol.QUBIT_PG
        assert outcome.factors["u"] == pytest.approx(1.0)
        assert outcome.factors["v"] == pytest.approx(0.0)
        assert outcome.p_detect == pytest.approx(0.5 + 0.5 * np.cos(outcome.beta_reference), abs=1e-10)
        assert outcome.p_formula == pytest.approx(outcome.p_detect, abs=1e-10)
        assert outcome.cos_beta_recovered == pytest.approx(np.cos(outcome.beta_reference), abs=1e-9)

    def test_weak_decay_recovers_phase(self):
        outcome = ramsey_pg(JCParams(g=1.0, delta=0.5, gamma=0.05))
        assert abs(outcome.cos_beta_recovered - np.cos(outcome.beta_reference)) < 5e-3
        assert outcome.total_population == pytest.approx(1.0, abs=1e-8)
        assert not outcome.warning_flags

    def test_needs_vacuum_doublet(self, fock_jc):
        with pytest.raises(InvalidParameterError):
            ramsey_pg(fock_jc)

    def test_serialization(self):
        row = ramsey_pg(JCParams(g=1.0, delta=0.5, gamma=0.05)).to_dict()
        assert row["protocol"] == "qubit-Pg"
        assert "factor_u" in row and "factor_v" in row


class TestMultiChannelProtocol:

    def test_single_channel_limit(self):
        p = JCParams(g=1.0, delta=0.5, gamma=0.05)
        multi = ramsey_pg_multichannel(p, gamma_g=0.05)
        assert multi.protocol is RamseyProtocol.MULTI_CHANNEL_PG
        assert multi.p_detect == pytest.approx(ramsey_pg(p).p_detect, abs=1e-12)

    def test_other_levels_lower_the_offset(self):
        p = JCParams(g=1.0, delta=0.5, gamma=0.05)
        outcome = ramsey_pg_multichannel(p, gamma_g=0.0)
        assert outcome.sector_populations["atom_to_other"] > 0.0
        assert outcome.total_population == pytest.approx(1.0, abs=1e-8)
        assert abs(outcome.cos_beta_recovered - np.cos(outcome.beta_reference)) < 5e-3

    def test_rate_bounds(self):
        with pytest.raises(InvalidParameterError):
            ramsey_pg_multichannel(JCParams(g=1.0, delta=0.5, gamma=0.05), gamma_g=0.1)


class TestFockProtocol:

    def test_simulation_matches_formula(self, fock_jc):
        outcome = ramsey_pf_fock(fock_jc)
        assert outcome.protocol is RamseyProtocol.FOCK_PF
        assert abs(outcome.p_detect - outcome.p_formula) < 5e-3
        assert outcome.total_population == pytest.approx(1.0, abs=1e-8)

    def test_vacuum_without_loss_is_ideal(self):
        outcome = ramsey_pf_fock(JCParams(g=1.0, delta=0.5))
        assert outcome.p_detect == pytest.approx(0.5 + 0.5 * np.cos(outcome.beta_reference), abs=1e-10)

    def test_guard_is_enforced(self):
        with pytest.raises(InvalidParameterError):
            ramsey_pf_fock(JCParams(g=1.0, delta=0.5, gamma=0.5, kappa=0.01, n=1))

    def test_guard_limit_overrides_default(self, fock_jc):
        # rate/Omega_1 = 0.06/1.436, inside the default 0.3
        with pytest.raises(InvalidParameterError):
            ramsey_pf_fock(fock_jc, guard_limit=0.01)


class TestInversion:

    def test_clipping_is_flagged(self):
        cos_beta, beta, flags = _invert(0.6, 0.5)
        assert cos_beta == 1.0
        assert beta == 0.0
        assert flags == ("inversion_clipped",)

    def test_in_range(self):
        cos_beta, beta, flags = _invert(-0.25, 0.5)
        assert cos_beta == pytest.approx(-0.5)
        assert beta == pytest.approx(2 * np.pi / 3)
        assert flags == ()


class TestDynamicalContamination:

    def test_previous_method_formula(self):
        p = JCParams(g=1.0, delta=0.5, gamma=0.02, kappa=0.01)
        assert previous_method_dynamical_contamination(p) == dynamical_contamination(p)

    def test_measured_matches_first_order(self):
        p = JCParams(g=1.0, delta=1.0, gamma=0.01)
        assert measured_dynamical_contamination(p) == pytest.approx(dynamical_contamination(p), rel=0.05)

    def test_guard_violation_warns(self):
        with pytest.warns(GuardViolationWarning):
            previous_method_dynamical_contamination(JCParams(g=1.0, delta=0.5, gamma=1.0))
