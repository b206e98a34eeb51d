import numpy as np
import pytest

from ionbath.constants import HBAR
from ionbath.errors import ConfigurationError
from ionbath.hilbert import (
    HilbertLayout,
    QuantumState,
    basis_ket,
    embed,
    fock_ladder,
    partial_trace,
    product_density,
    sigma_z,
    thermal_mix,
)


def random_density(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


class TestFockLadder:
    def test_cutoff_two(self):
        a, adag = fock_ladder(2)
        assert np.allclose(a, [[0, 1], [0, 0]])
        assert np.allclose(adag, a.conj().T)

    def test_sqrt_rule(self):
        a, _ = fock_ladder(4)
        assert a[2, 3] == pytest.approx(np.sqrt(3))

    def test_commutator_identity_below_cutoff(self):
        # [a, a+] = 1 except in the top Fock level, where truncation bites
        a, adag = fock_ladder(16)
        comm = a @ adag - adag @ a
        assert np.allclose(comm[:15, :15], np.eye(16)[:15, :15], atol=1e-14)
        assert comm[15, 15] == pytest.approx(-15.0)  # top-level artifact

    def test_number_spectrum(self):
        a, adag = fock_ladder(9)
        evals = np.sort(np.linalg.eigvalsh(adag @ a))
        assert np.allclose(evals, np.arange(9), atol=1e-12)

    def test_rejects_small_cutoff(self):
        with pytest.raises(ConfigurationError):
            fock_ladder(1)


class TestEmbed:
    def setup_method(self):
        self.layout = HilbertLayout((2, 2), (4, 3))

    def test_sigma_z_eigenstate(self):
        op = embed(sigma_z, 0, self.layout).matrix
        ket = basis_ket(self.layout, "uu", (0, 0))
        assert np.allclose(op @ ket, ket)
        ket_d = basis_ket(self.layout, "du", (0, 0))
        assert np.allclose(op @ ket_d, -ket_d)

    def test_identity_embeds_to_identity(self):
        for pos, d in enumerate(self.layout.dims):
            op = embed(np.eye(d), pos, self.layout).matrix
            assert np.allclose(op, np.eye(self.layout.total_dim))

    def test_disjoint_factors_commute(self):
        a_cm, _ = fock_ladder(4)
        _, adag_wb = fock_ladder(3)
        A = embed(a_cm, 2, self.layout).matrix
        B = embed(adag_wb, 3, self.layout).matrix
        assert np.allclose(A @ B, B @ A)

    def test_algebra_homomorphism(self):
        rng = np.random.default_rng(3)
        layout = HilbertLayout((2,), (3, 2))
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = embed(A @ B, 1, layout).matrix
        rhs = embed(A, 1, layout).matrix @ embed(B, 1, layout).matrix
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            embed(np.eye(3), 0, self.layout)


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rng = np.random.default_rng(5)
        layout = HilbertLayout((2, 2), (3, 2))
        rho_s = random_density(rng, 4)
        rho_m = random_density(rng, 6)
        rho = np.kron(rho_s, rho_m)
        red = partial_trace((rho, layout), keep=(0, 1))
        assert np.allclose(red, rho_s, atol=1e-12)

    def test_maximally_entangled_reduces_to_mixed(self):
        layout = HilbertLayout((2, 2), (2,))
        bell = (basis_ket(layout, "uu", (0,)) + basis_ket(layout, "dd", (0,))) / np.sqrt(2)
        rho = np.outer(bell, bell.conj())
        red = partial_trace((rho, layout), keep=(0,))
        assert np.allclose(red, np.eye(2) / 2, atol=1e-12)

    def test_trace_identity_random(self):
        rng = np.random.default_rng(11)
        layout = HilbertLayout((2, 2), (3,))
        rho = random_density(rng, 12)
        red = partial_trace((rho, layout), keep=(0, 1))
        assert np.trace(red) == pytest.approx(1.0, abs=1e-12)

    def test_expectation_consistency_with_embed(self):
        # Tr[embed(A) rho] = Tr[A * partial_trace(rho)]
        rng = np.random.default_rng(13)
        layout = HilbertLayout((2, 2), (3, 2))
        rho = random_density(rng, layout.total_dim)
        for pos, d in enumerate(layout.dims):
            A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            lhs = np.trace(embed(A, pos, layout).matrix @ rho)
            rhs = np.trace(A @ partial_trace((rho, layout), keep=(pos,)))
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_invalid_factors_rejected(self):
        layout = HilbertLayout((2, 2), (3,))
        rho = np.eye(12) / 12
        with pytest.raises(ConfigurationError):
            partial_trace((rho, layout), keep=())
        with pytest.raises(ConfigurationError):
            partial_trace((rho, layout), keep=(5,))


class TestThermalMix:
    def test_standard_preparation(self):
        rho = thermal_mix(0.9, 0.1, 6)
        assert np.allclose(np.diag(rho), [0.9, 0.1, 0, 0, 0, 0])
        assert np.allclose(rho, np.diag(np.diag(rho)))

    def test_ground_state_projector(self):
        rho = thermal_mix(1.0, 0.0, 4)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert np.allclose(rho, expected)

    def test_energy_expectation(self):
        # <n + 1/2> = 0.9*0.5 + 0.1*1.5 = 0.6, so E = 0.6 hbar omega
        omega = 2 * np.pi * 500e3
        rho = thermal_mix(0.9, 0.1, 8)
        a, adag = fock_ladder(8)
        E = HBAR * omega * np.real(np.trace((adag @ a + np.eye(8) / 2) @ rho))
        assert E == pytest.approx(0.6 * HBAR * omega, rel=1e-12)

    def test_rejects_bad_probabilities(self):
        with pytest.raises(ConfigurationError):
            thermal_mix(0.5, 0.4, 4)
        with pytest.raises(ConfigurationError):
            thermal_mix(1.2, -0.2, 4)


class TestQuantumState:
    def test_defect_reports(self):
        layout = HilbertLayout((2, 2), (2,))
        rho = np.eye(8, dtype=complex) / 8
        st = QuantumState(rho, layout)
        assert st.trace_defect() < 1e-15
        assert st.herm_defect() < 1e-15
        assert st.purity() == pytest.approx(1 / 8)
        assert st.min_eigenvalue() == pytest.approx(1 / 8)
        st.validate()

    def test_validate_rejects_bad_trace(self):
        layout = HilbertLayout((2, 2), (2,))
        with pytest.raises(ConfigurationError):
            QuantumState(np.eye(8, dtype=complex), layout).validate()


class TestProductDensity:
    def test_assembles_in_factor_order(self):
        layout = HilbertLayout((2, 2), (3, 2))
        spin = np.diag([1.0, 0, 0, 0]).astype(complex)
        cm = thermal_mix(0.9, 0.1, 3)
        wb = thermal_mix(1.0, 0.0, 2)
        st = product_density(layout, spin, [cm, wb])
        ket = basis_ket(layout, "uu", (1, 0))
        assert np.real(ket.conj() @ st.rho @ ket) == pytest.approx(0.1)
        st.validate()
