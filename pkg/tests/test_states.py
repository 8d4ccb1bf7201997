"""Ready-state preparation: product factors, zero-magnetization sector,
thermal environment draws."""

import numpy as np
import pytest

from spinmeter.core import SpinLayout, accumulate_two_spin_term, basis_state, \
    tensor_product
from spinmeter.hamiltonian import HamiltonianSpec, compile_hamiltonian, \
    draw_couplings, environment_hamiltonian
from spinmeter.states import (ReadyStatePrep, assemble_initial,
                              box_muller_complex, canonical_ready_kind,
                              dicke_zero, random_zero_sector, system_state,
                              thermal_state, zero_sector_indices)

from conftest import dense_from_terms, dense_imaginary, site_operator, SZ


class TestSystemState:
    def test_endpoints(self):
        np.testing.assert_array_equal(system_state(0.0), [1.0, 0.0])
        np.testing.assert_array_equal(system_state(1.0), [0.0, 1.0])

    def test_three_quarters(self):
        psi = system_state(0.75)
        assert psi[1] == pytest.approx(np.sqrt(3.0) / 2.0)
        assert psi[0] == pytest.approx(0.5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            system_state(-0.1)
        with pytest.raises(ValueError):
            system_state(1.2)


class TestSector:
    def test_sector_size_four_spins(self):
        idx = zero_sector_indices(4)
        assert idx.size == 6  # C(4, 2)
        assert all(bin(int(m)).count("1") == 2 for m in idx)

    def test_dicke_two_spins(self):
        # (|01> + |10>)/sqrt2 in bit order: indices 1 and 2
        psi = dicke_zero(2)
        want = np.zeros(4, dtype=np.complex128)
        want[1] = want[2] = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(psi, want, atol=1e-15)

    def test_dicke_four_spins_amplitudes(self):
        psi = dicke_zero(4)
        nonzero = np.nonzero(psi)[0]
        np.testing.assert_array_equal(nonzero, zero_sector_indices(4))
        np.testing.assert_allclose(psi[nonzero], 1.0 / np.sqrt(6.0))

    def test_dicke_total_spin(self):
        # |S = N/2, M = 0>: S_A.S_A eigenvalue S(S+1) = 6 for four spins
        n = 4
        psi = dicke_zero(n)
        acc = np.zeros_like(psi)
        for i in range(n):
            for j in range(i + 1, n):
                for ax in "xyz":
                    accumulate_two_spin_term(psi, i, j, ax, 2.0, acc)
        acc += 3.0 * (n / 4.0) * psi  # sum_i S_i.S_i = 3N/4
        assert np.vdot(psi, acc).real == pytest.approx(6.0)

    def test_dicke_chain_energy(self):
        # permutation symmetry gives <S_i.S_j> = (S(S+1) - 3N/4) / (N(N-1))
        # = 1/4 per pair at N = 4, so the 3-bond chain sits at -J(N-1)/4
        n = 4
        psi = dicke_zero(n)
        terms = [(i, i + 1, ax, -1.0) for i in range(n - 1) for ax in "xyz"]
        h = dense_from_terms(n, terms)
        got = np.vdot(psi, h @ psi).real
        assert got == pytest.approx(-0.75, abs=1e-13)

    def test_random_sector_support_and_seeding(self):
        psi1 = random_zero_sector(4, 11)
        psi2 = random_zero_sector(4, 11)
        psi3 = random_zero_sector(4, 12)
        np.testing.assert_array_equal(psi1, psi2)
        assert not np.array_equal(psi1, psi3)
        assert abs(np.linalg.norm(psi1) - 1.0) < 1e-12
        outside = np.setdiff1d(np.arange(16), zero_sector_indices(4))
        assert np.max(np.abs(psi1[outside])) == 0.0

    def test_box_muller_moments(self):
        rng = np.random.default_rng(5)
        z = box_muller_complex(rng, 200000)
        # complex standard normal: E|z|^2 = 2 with our radius convention
        assert abs(np.mean(np.abs(z) ** 2) - 2.0) < 0.02
        assert abs(np.mean(z)) < 0.01


class TestThermal:
    def test_thermal_matches_dense_chain(self):
        lay = SpinLayout(4, 3)
        spec = HamiltonianSpec()
        real = draw_couplings(lay, 4)
        env = environment_hamiltonian(spec, lay, real)
        dense = dense_from_terms(3, env.all_terms())
        rng = np.random.default_rng(77)
        raw = box_muller_complex(rng, 8)
        raw /= np.linalg.norm(raw)
        got = thermal_state(env, 10.0, 77)
        want = dense_imaginary(dense, raw, 10.0)
        assert np.max(np.abs(got - want)) < 1e-9

    def test_beta_zero_is_raw_draw(self):
        lay = SpinLayout(4, 3)
        env = environment_hamiltonian(HamiltonianSpec(), lay,
                                      draw_couplings(lay, 4))
        rng = np.random.default_rng(31)
        raw = box_muller_complex(rng, 8)
        raw /= np.linalg.norm(raw)
        got = thermal_state(env, 0.0, 31)
        np.testing.assert_allclose(got, raw, atol=1e-14)

    def test_energy_monotone_in_beta(self):
        lay = SpinLayout(4, 4)
        env = environment_hamiltonian(HamiltonianSpec(), lay,
                                      draw_couplings(lay, 4))
        es = [env.expectation(thermal_state(env, b, 9))
              for b in (0.0, 5.0, 20.0, 80.0)]
        assert all(b < a + 1e-12 for a, b in zip(es, es[1:]))


class TestAssembly:
    def layout_and_pieces(self):
        lay = SpinLayout(4, 3)
        spec = HamiltonianSpec()
        real = draw_couplings(lay, 6)
        return lay, spec, real

    def test_aliases(self):
        assert canonical_ready_kind("dicke0") == "dicke_zero"
        assert canonical_ready_kind("randomR") == "random_zero_sector"
        assert canonical_ready_kind("jointBeta") == "joint_thermal"
        assert canonical_ready_kind("dicke_zero") == "dicke_zero"
        with pytest.raises(ValueError):
            canonical_ready_kind("bogus")

    def test_dicke_assembly_is_product(self):
        lay, spec, real = self.layout_and_pieces()
        psi = assemble_initial(0.75, "dicke0", 50.0, 123, spec, lay, real)
        assert psi.shape == (lay.dim,)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
        # system factor: coherence <up|rho|down> = sqrt(a(1-a)) = sqrt(3)/4
        up = psi.reshape(-1, 2)
        coh = np.vdot(up[:, 0], up[:, 1])
        assert abs(coh) == pytest.approx(np.sqrt(3.0) / 4.0, abs=1e-12)

    def test_apparatus_marginal_is_dicke(self):
        lay, spec, real = self.layout_and_pieces()
        psi = assemble_initial(1.0, "dicke0", 50.0, 123, spec, lay, real)
        # a = 1: system bit fixed at 1, factor out and trace the environment
        block = psi.reshape(-1, 1 << 5)  # rows: env, cols: (A, S) bits
        rho_sa = np.einsum("ei,ej->ij", block.conj(), block)
        probs = np.real(np.diag(rho_sa))
        # every populated index must have system bit 1 and two apparatus ups
        populated = np.nonzero(probs > 1e-15)[0]
        assert all(m & 1 for m in populated)
        assert all(bin(m >> 1).count("1") == 2 for m in populated)

    def test_random_sector_assembly_distinct_seeds(self):
        lay, spec, real = self.layout_and_pieces()
        p1 = assemble_initial(0.5, "randomR", 50.0, 1, spec, lay, real)
        p2 = assemble_initial(0.5, "randomR", 50.0, 2, spec, lay, real)
        assert not np.allclose(p1, p2)

    def test_joint_thermal_couples_apparatus_to_environment(self):
        lay, spec, real = self.layout_and_pieces()
        prep = ReadyStatePrep(spec, lay, real)
        psi = prep.build(0.75, "jointBeta", 50.0, 9)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
        # system factor remains pure: coherence magnitude sqrt(3)/4
        u = psi.reshape(-1, 2)
        assert abs(np.vdot(u[:, 0], u[:, 1])) == pytest.approx(
            np.sqrt(3.0) / 4.0, abs=1e-12)
        # apparatus-environment entanglement: the A,E marginal of a joint
        # thermal draw is not a product, so the apparatus block entropy of
        # the AE pure state is positive
        blk = psi.reshape(-1, 2)[:, 1].reshape(-1, 1 << 4)  # env x A
        blk = blk / np.linalg.norm(blk)
        s = np.linalg.svd(blk, compute_uv=False)
        p = s ** 2
        p = p[p > 1e-14]
        assert -(p * np.log(p)).sum() > 0.01

    def test_zero_environment_layout(self):
        lay = SpinLayout(4, 0)
        spec = HamiltonianSpec(I_AE=0.0, K=0.0)
        real = draw_couplings(lay, 0)
        psi = assemble_initial(0.5, "dicke0", 50.0, 5, spec, lay, real)
        assert psi.shape == (32,)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12

    def test_low_temperature_joint_reaches_block_ground(self):
        # beta large: the A+E block converges to the ground space of the
        # block Hamiltonian (sans system coupling)
        lay = SpinLayout(2, 2)
        spec = HamiltonianSpec(K=-1.0, I_AE=-0.25)
        real = draw_couplings(lay, 9)
        prep = ReadyStatePrep(spec, lay, real)
        psi = prep.build(1.0, "jointBeta", 400.0, 3)
        joint = prep.joint_ham
        dense = dense_from_terms(4, joint.all_terms())
        evals, evecs = np.linalg.eigh(dense)
        space = evecs[:, evals < evals[0] + 1e-9]
        blk = psi.reshape(-1, 2)[:, 1]  # a = 1: keep system-up column
        fid = np.sum(np.abs(space.conj().T @ blk) ** 2)
        assert fid > 1.0 - 1e-6
