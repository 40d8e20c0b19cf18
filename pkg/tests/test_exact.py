"""
Tests for the exact-diagonalization oracle.

Validates:
- The full Hamiltonian on small chains
- Symmetries and norm conservation of exact evolution
- Reduced density matrices of dense states
- Memory guards
"""

from __future__ import annotations

import numpy as np
import pytest

from xxz_quench.errors import SiteIndexError, SystemSizeError
from xxz_quench.model.spin_model import Axis, CouplingParams, bond_hamiltonian, pauli
from xxz_quench.mps.state import Spin, domain_wall_pattern, neel_pattern
from xxz_quench.oracle.exact import (
    DenseState,
    ExactPropagator,
    ed_concurrence_profile,
    ed_energy,
    ed_evolve,
    ed_magnetization_profile,
    ed_two_site_rdm,
    full_hamiltonian,
    product_dense_state,
)


def _total_sz(n_sites: int) -> np.ndarray:
    sz = pauli(Axis.Z)
    total = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    for i in range(n_sites):
        total += np.kron(np.kron(np.eye(2**i), sz), np.eye(2 ** (n_sites - i - 1)))
    return total


class TestFullHamiltonian:
    """Test the sparse chain Hamiltonian."""

    def test_two_sites_is_bond_term(self):
        params = CouplingParams(j_z=0.3, n_sites=2)
        np.testing.assert_allclose(
            full_hamiltonian(params).toarray(), bond_hamiltonian(params).matrix, atol=1e-15
        )

    def test_three_site_xx_ground_energy(self):
        h = full_hamiltonian(CouplingParams(j_z=0.0, n_sites=3)).toarray()
        assert np.linalg.eigvalsh(h)[0] == pytest.approx(-2 * np.sqrt(2), abs=1e-12)

    def test_hermitian(self):
        h = full_hamiltonian(CouplingParams(j_z=1.7, n_sites=6)).toarray()
        np.testing.assert_allclose(h, h.conj().T, atol=1e-15)

    def test_commutes_with_total_sz(self):
        n = 5
        h = full_hamiltonian(CouplingParams(j_z=0.5, n_sites=n)).toarray()
        sz = _total_sz(n)
        np.testing.assert_allclose(h @ sz - sz @ h, 0.0, atol=1e-12)

    def test_neel_expectation(self):
        n = 6
        params = CouplingParams(j_z=1.0, n_sites=n)
        psi = product_dense_state(neel_pattern(n))
        assert ed_energy(psi, full_hamiltonian(params)) == pytest.approx(-(n - 1))

    def test_size_guard(self):
        with pytest.raises(SystemSizeError):
            full_hamiltonian(CouplingParams(n_sites=15))


class TestExactEvolution:
    """Test the eigendecomposition propagator."""

    def setup_method(self):
        self.params = CouplingParams(j_z=1.0, n_sites=6)
        self.psi0 = product_dense_state(domain_wall_pattern(6))

    def test_time_zero_returns_initial_state(self):
        (psi,) = ed_evolve(self.psi0, self.params, [0.0])
        assert psi is self.psi0

    def test_norm_conserved(self):
        for psi in ed_evolve(self.psi0, self.params, [0.5, 3.0, 17.0]):
            assert psi.norm == pytest.approx(1.0, abs=1e-12)

    def test_energy_conserved(self):
        propagator = ExactPropagator(self.params)
        e0 = ed_energy(self.psi0, propagator.hamiltonian)
        for psi in propagator.evolve(self.psi0, [1.0, 5.0]):
            assert ed_energy(psi, propagator.hamiltonian) == pytest.approx(e0, abs=1e-10)

    def test_composition(self):
        propagator = ExactPropagator(self.params)
        (half,) = propagator.evolve(self.psi0, [0.4])
        (twice,) = propagator.evolve(half, [0.4])
        (full,) = propagator.evolve(self.psi0, [0.8])
        np.testing.assert_allclose(twice.amplitudes, full.amplitudes, atol=1e-12)

    def test_eigenstate_only_gains_phase(self):
        psi0 = product_dense_state([Spin.DOWN] * 6)
        (psi,) = ed_evolve(psi0, self.params, [2.0])
        assert abs(np.vdot(psi0.amplitudes, psi.amplitudes)) == pytest.approx(1.0, abs=1e-12)

    def test_size_guard(self):
        with pytest.raises(SystemSizeError):
            ExactPropagator(CouplingParams(n_sites=13))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ExactPropagator(self.params).evolve(product_dense_state(neel_pattern(4)), [1.0])


class TestDenseObservables:
    """Test reductions of dense states."""

    def test_rdm_is_a_density_matrix(self):
        (psi,) = ed_evolve(product_dense_state(neel_pattern(6)),
                           CouplingParams(j_z=0.5, n_sites=6), [1.3])
        for i in range(5):
            rho = ed_two_site_rdm(psi, i)
            assert rho.trace == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(rho.matrix, rho.matrix.conj().T, atol=1e-14)
            assert rho.eigenvalues()[0] > -1e-12

    def test_product_profiles(self):
        psi = product_dense_state(domain_wall_pattern(4))
        np.testing.assert_array_equal(ed_concurrence_profile(psi), np.zeros(3))
        np.testing.assert_allclose(ed_magnetization_profile(psi), [1, 1, -1, -1])

    def test_singlet_pair(self):
        amplitudes = np.zeros(8, dtype=complex)
        # (|↑↓⟩ − |↓↑⟩)/√2 on sites 0, 1 and ↑ on site 2
        amplitudes[0b010] = 1 / np.sqrt(2)
        amplitudes[0b100] = -1 / np.sqrt(2)
        profile = ed_concurrence_profile(DenseState(amplitudes=amplitudes))
        assert profile[0] == pytest.approx(1.0, abs=1e-10)
        assert profile[1] == pytest.approx(0.0, abs=1e-10)

    def test_rdm_index_guard(self):
        with pytest.raises(SiteIndexError):
            ed_two_site_rdm(product_dense_state(neel_pattern(4)), 3)

    def test_dense_state_length(self):
        with pytest.raises(ValueError):
            DenseState(amplitudes=np.ones(6))
