"""Reduced density matrices, coherences, entropies, order parameters."""

import numpy as np
import pytest

from spinmeter.core import SpinLayout, basis_state, tensor_product
from spinmeter.hamiltonian import HamiltonianSpec, compile_hamiltonian, \
    draw_couplings
from spinmeter.chebyshev import evolve
from spinmeter.observables import (branch_weights, check_rdm, coherence,
                                   coherence_from_state, conditional_rdm,
                                   conditional_rdm_from_state,
                                   conditional_order_parameter, correlation,
                                   entropy, magnetization,
                                   order_parameter_from_state, rdm,
                                   rdm_system_apparatus, system_z)
from spinmeter.states import assemble_initial, dicke_zero, system_state

from conftest import dense_rdm, random_state


class TestRdm:
    def test_pure_state_purity(self, rng):
        psi = random_state(1 << 6, rng)
        rho = rdm(psi, range(6))
        np.testing.assert_allclose(rho @ rho, rho, atol=1e-12)
        assert np.trace(rho).real == pytest.approx(1.0)

    def test_bell_pair_marginal(self):
        lay = SpinLayout(2, 0)
        psi = np.zeros(8, dtype=np.complex128)
        # (|00> + |11>)/sqrt2 on spins (0, 1), spin 2 fixed down
        psi[0b000] = psi[0b011] = 1.0 / np.sqrt(2.0)
        rho = rdm(psi, [0])
        np.testing.assert_allclose(rho, 0.5 * np.eye(2), atol=1e-14)

    def test_matches_dense_oracle_contiguous(self, rng):
        psi = random_state(1 << 8, rng)
        got = rdm(psi, [0, 1, 2])
        want = dense_rdm(psi, [0, 1, 2], 8)
        np.testing.assert_allclose(got, want, atol=1e-13)

    def test_matches_dense_oracle_scattered(self, rng):
        psi = random_state(1 << 10, rng)
        got = rdm(psi, [1, 4, 7])
        want = dense_rdm(psi, [1, 4, 7], 10)
        np.testing.assert_allclose(got, want, atol=1e-13)

    def test_kept_count_guard(self, rng):
        psi = random_state(1 << 12, rng)
        with pytest.raises(ValueError):
            rdm(psi, range(11))

    def test_system_apparatus_shortcut(self, rng):
        lay = SpinLayout(4, 3)
        psi = random_state(lay.dim, rng)
        got = rdm_system_apparatus(psi, lay)
        want = dense_rdm(psi, list(range(5)), lay.n_total)
        np.testing.assert_allclose(got, want, atol=1e-13)

    def test_telemetry_accepts_valid(self, rng):
        psi = random_state(1 << 8, rng)
        check_rdm(rdm(psi, [0, 1, 2]))

    def test_telemetry_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            check_rdm(np.eye(4, dtype=np.complex128))


class TestCoherence:
    def test_product_state_value(self):
        lay = SpinLayout(4, 2)
        spec = HamiltonianSpec()
        real = draw_couplings(lay, 3)
        psi = assemble_initial(0.75, "dicke0", 50.0, 2, spec, lay, real)
        rho = rdm_system_apparatus(psi, lay)
        c = coherence(rho)
        assert abs(c) == pytest.approx(np.sqrt(3.0) / 4.0, abs=1e-12)

    def test_state_shortcut_matches_rdm_route(self, rng):
        lay = SpinLayout(4, 3)
        psi = random_state(lay.dim, rng)
        via_rdm = coherence(rdm_system_apparatus(psi, lay))
        direct = coherence_from_state(psi)
        assert via_rdm == pytest.approx(direct, abs=1e-13)

    def test_magnitude_bounded_by_branch_weights(self, rng):
        # |rho_ud| <= sqrt(w_up w_down) for any state
        lay = SpinLayout(4, 3)
        for _ in range(20):
            psi = random_state(lay.dim, rng)
            w_up, w_down = branch_weights(psi)
            assert abs(coherence_from_state(psi)) \
                <= np.sqrt(w_up * w_down) + 1e-12

    def test_branch_weights_sum(self, rng):
        psi = random_state(1 << 7, rng)
        w_up, w_down = branch_weights(psi)
        assert w_up + w_down == pytest.approx(1.0, abs=1e-12)
        psi_up = assemble_initial(1.0, "dicke0", 0.0, 1, HamiltonianSpec(),
                                  SpinLayout(2, 0),
                                  draw_couplings(SpinLayout(2, 0), 0))
        assert branch_weights(psi_up)[0] == pytest.approx(1.0)


class TestConditional:
    def test_conditioning_on_pure_branch(self):
        lay = SpinLayout(2, 1)
        spec = HamiltonianSpec()
        real = draw_couplings(lay, 1)
        psi = assemble_initial(1.0, "dicke0", 10.0, 4, spec, lay, real)
        rho = rdm_system_apparatus(psi, lay)
        rho_up = conditional_rdm(rho, "up")
        assert np.trace(rho_up).real == pytest.approx(1.0)
        with pytest.raises(ValueError):
            conditional_rdm(rho, "down")  # zero-weight branch

    def test_state_route_matches_rdm_route(self, rng):
        lay = SpinLayout(4, 3)
        psi = random_state(lay.dim, rng)
        rho = rdm_system_apparatus(psi, lay)
        for branch in ("up", "down"):
            a = conditional_rdm(rho, branch)
            b = conditional_rdm_from_state(psi, branch, lay)
            np.testing.assert_allclose(a, b, atol=1e-13)

    def test_branch_labels(self, rng):
        lay = SpinLayout(4, 2)
        psi = random_state(lay.dim, rng)
        rho = rdm_system_apparatus(psi, lay)
        np.testing.assert_allclose(conditional_rdm(rho, 1),
                                   conditional_rdm(rho, "up"), atol=1e-15)
        np.testing.assert_allclose(conditional_rdm(rho, 0),
                                   conditional_rdm(rho, "down"), atol=1e-15)


class TestEntropy:
    def test_diagonal_example(self):
        rho = np.diag([0.75, 0.25]).astype(np.complex128)
        # -(3/4 ln 3/4 + 1/4 ln 1/4) = 0.5623...
        assert entropy(rho) == pytest.approx(0.562335, abs=1e-6)

    def test_maximally_mixed(self):
        rho = np.eye(16, dtype=np.complex128) / 16.0
        assert entropy(rho) == pytest.approx(np.log(16.0), abs=1e-12)

    def test_pure_state_zero(self, rng):
        psi = random_state(1 << 5, rng)
        rho = np.outer(psi, psi.conj())
        assert entropy(rho) == pytest.approx(0.0, abs=1e-10)

    def test_negative_eigenvalue_raises(self):
        rho = np.diag([1.1, -0.1]).astype(np.complex128)
        with pytest.raises(ValueError):
            entropy(rho)

    def test_tiny_negative_tolerated(self):
        rho = np.diag([1.0, -1e-13]).astype(np.complex128)
        assert entropy(rho) == pytest.approx(0.0, abs=1e-10)


class TestOrderParameters:
    def layout(self):
        return SpinLayout(4, 3)

    def test_magnetization_basis_states(self):
        lay = self.layout()
        all_up = (0b1111 << 1)
        assert magnetization(basis_state(lay, all_up), lay) \
            == pytest.approx(1.0)
        assert magnetization(basis_state(lay, 0), lay) == pytest.approx(-1.0)
        half = (0b0011 << 1)
        assert magnetization(basis_state(lay, half), lay) \
            == pytest.approx(0.0)

    def test_system_z_values(self):
        lay = self.layout()
        assert system_z(basis_state(lay, 1)) == pytest.approx(1.0)
        assert system_z(basis_state(lay, 0)) == pytest.approx(-1.0)

    def test_correlation_aligned_product(self):
        lay = self.layout()
        # system up, apparatus all up: <sigma^z_S sigma^z_A>/N_A = +1
        psi = basis_state(lay, 0b11111)
        assert correlation(psi, lay) == pytest.approx(1.0)
        # system down, apparatus all up: -1
        psi = basis_state(lay, 0b11110)
        assert correlation(psi, lay) == pytest.approx(-1.0)

    def test_correlation_dicke_zero(self):
        lay = self.layout()
        parts = [system_state(1.0), dicke_zero(4),
                 np.eye(8, dtype=np.complex128)[0]]
        psi = tensor_product(parts)
        # M = 0 sector: sum of apparatus z is zero in every populated index
        assert correlation(psi, lay) == pytest.approx(0.0, abs=1e-14)

    def test_transverse_correlations_from_accumulator(self, rng):
        lay = self.layout()
        psi = random_state(lay.dim, rng)
        for ax in ("x", "y"):
            val = correlation(psi, lay, axis=ax)
            assert np.isfinite(val)
            assert abs(val) <= 1.0 + 1e-12

    def test_identity_weighted_branches_equal_magnetization(self, rng):
        # w_up m_up + w_down m_down = m for every state resolving the
        # apparatus magnetization over system branches
        lay = self.layout()
        for _ in range(10):
            psi = random_state(lay.dim, rng)
            w_up, w_down = branch_weights(psi)
            m_up = order_parameter_from_state(psi, "up", lay)
            m_down = order_parameter_from_state(psi, "down", lay)
            total = magnetization(psi, lay)
            assert w_up * m_up + w_down * m_down \
                == pytest.approx(total, abs=1e-10)

    def test_conditional_routes_agree(self, rng):
        lay = self.layout()
        psi = random_state(lay.dim, rng)
        rho = rdm_system_apparatus(psi, lay)
        for branch in ("up", "down"):
            a = conditional_order_parameter(rho, branch, lay)
            b = order_parameter_from_state(psi, branch, lay)
            assert a == pytest.approx(b, abs=1e-12)


class TestPhysicalEvolutionTelemetry:
    def test_short_run_preserves_structure(self):
        # quick integration check tying the stack together: evolve a ready
        # state briefly and verify the conserved quantities land where the
        # longer experiments assume they do
        lay = SpinLayout(4, 4)
        spec = HamiltonianSpec()
        real = draw_couplings(lay, 2)
        ham = compile_hamiltonian(spec, lay, real)
        psi = assemble_initial(0.75, "dicke0", 50.0, 3, spec, lay, real)
        sz0 = system_z(psi)
        e0 = ham.expectation(psi)
        for _ in range(5):
            psi = evolve(psi, ham, 2.0)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-10
        assert abs(system_z(psi) - sz0) < 1e-10
        assert abs(ham.expectation(psi) - e0) < 1e-8 * abs(e0)
        rho = rdm_system_apparatus(psi, lay)
        check_rdm(rho)
