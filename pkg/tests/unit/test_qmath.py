"""Unit tests for the register math primitives."""

import numpy as np
import pytest

from netbell.simulators import qmath


@pytest.mark.unit
class TestKron:
    """Test Kronecker products and the qubit ordering."""

    def test_first_operand_is_most_significant(self):
        """Test that X on qubit 0 flips the most significant bit."""
        op = qmath.kron(qmath.PAULI_X, qmath.PAULI_I)
        ket = op @ qmath.basis_ket([0, 0])
        np.testing.assert_allclose(ket, qmath.basis_ket([1, 0]))

    def test_kron_all_empty(self):
        """Test that an empty product is the scalar one."""
        np.testing.assert_allclose(qmath.kron_all(), np.ones((1, 1)))

    def test_pauli_string(self):
        """Test Pauli label strings."""
        np.testing.assert_allclose(
            qmath.pauli_string("xz"), np.kron(qmath.PAULI_X, qmath.PAULI_Z)
        )
        with pytest.raises(ValueError, match="unknown Pauli label"):
            qmath.pauli_string("XQ")


@pytest.mark.unit
class TestPredicates:
    """Test the unitary, Hermitian and density-matrix checks."""

    def test_num_qubits_of(self):
        """Test dimension to qubit count."""
        assert qmath.num_qubits_of(8) == 3
        with pytest.raises(ValueError, match="not a power of two"):
            qmath.num_qubits_of(6)

    def test_is_unitary(self):
        """Test unitary detection."""
        assert qmath.is_unitary(qmath.HADAMARD)
        assert qmath.is_unitary(qmath.CNOT)
        assert not qmath.is_unitary(np.array([[1, 1], [0, 1]]))
        assert not qmath.is_unitary(np.ones((2, 3)))

    def test_is_density_matrix(self, rng):
        """Test density-matrix detection."""
        assert qmath.is_density_matrix(qmath.ket_to_density(qmath.PHI_PLUS))
        assert qmath.is_density_matrix(qmath.random_density_matrix(2, rng))
        assert not qmath.is_density_matrix(np.diag([1.5, -0.5]))
        assert not qmath.is_density_matrix(np.eye(2))

    def test_ket_to_density_requires_normalization(self):
        """Test that unnormalized kets are rejected."""
        with pytest.raises(ValueError, match="not normalized"):
            qmath.ket_to_density(np.array([1.0, 1.0]))


@pytest.mark.unit
class TestApplyUnitary:
    """Test unitary application on target qubits."""

    def test_cnot_makes_bell_state(self):
        """Test H then CNOT on |00> gives |Phi+>."""
        rho = qmath.ket_to_density(qmath.basis_ket([0, 0]))
        rho = qmath.apply_unitary(rho, qmath.HADAMARD, [0])
        rho = qmath.apply_unitary(rho, qmath.CNOT, [0, 1])
        np.testing.assert_allclose(
            rho, qmath.ket_to_density(qmath.PHI_PLUS), atol=1e-12
        )

    def test_target_order_matters(self):
        """Test that reversing targets swaps control and target."""
        rho = qmath.ket_to_density(qmath.basis_ket([0, 1]))
        out = qmath.apply_unitary(rho, qmath.CNOT, [1, 0])
        np.testing.assert_allclose(
            out, qmath.ket_to_density(qmath.basis_ket([1, 1])), atol=1e-12
        )

    def test_matches_embedded_operator(self, rng):
        """Test that in-place application agrees with full embedding."""
        rho = qmath.random_density_matrix(3, rng)
        u = qmath.random_unitary(4, rng)
        full = qmath.embed_operator(u, [2, 0], 3)
        np.testing.assert_allclose(
            qmath.apply_unitary(rho, u, [2, 0]), full @ rho @ full.conj().T, atol=1e-12
        )

    def test_rejects_bad_input(self):
        """Test shape, target and unitarity errors."""
        rho = np.eye(4) / 4
        with pytest.raises(ValueError, match="not unitary"):
            qmath.apply_unitary(rho, np.array([[1, 1], [0, 1]]), [0])
        with pytest.raises(ValueError, match="out of range"):
            qmath.apply_unitary(rho, qmath.PAULI_X, [2])
        with pytest.raises(ValueError, match="distinct"):
            qmath.apply_unitary(rho, qmath.CNOT, [1, 1])
        with pytest.raises(ValueError, match="does not act on"):
            qmath.apply_unitary(rho, qmath.CNOT, [0])


@pytest.mark.unit
class TestKraus:
    """Test Kraus channel application."""

    def test_completeness_check(self):
        """Test that incomplete Kraus sets are rejected."""
        with pytest.raises(ValueError, match="completeness"):
            qmath.check_kraus_completeness([0.5 * qmath.PAULI_I])
        with pytest.raises(ValueError, match="empty"):
            qmath.check_kraus_completeness([])

    def test_bit_flip_on_one_qubit(self):
        """Test a full bit flip on the second qubit."""
        rho = qmath.ket_to_density(qmath.basis_ket([0, 0]))
        out = qmath.apply_kraus(rho, [qmath.PAULI_X], [1])
        np.testing.assert_allclose(
            out, qmath.ket_to_density(qmath.basis_ket([0, 1])), atol=1e-12
        )

    def test_preserves_trace(self, rng):
        """Test that a random mixture of Paulis keeps the trace."""
        rho = qmath.random_density_matrix(2, rng)
        kraus = [np.sqrt(0.7) * qmath.PAULI_I, np.sqrt(0.3) * qmath.PAULI_Y]
        out = qmath.apply_kraus(rho, kraus, [0])
        assert qmath.is_density_matrix(out)


@pytest.mark.unit
class TestPartialTrace:
    """Test reduced states."""

    def test_bell_marginal_is_maximally_mixed(self):
        """Test that each half of |Phi+> is I/2."""
        rho = qmath.ket_to_density(qmath.PHI_PLUS)
        np.testing.assert_allclose(
            qmath.partial_trace(rho, [1]), np.eye(2) / 2, atol=1e-12
        )

    def test_product_state_order(self):
        """Test that the kept qubits come back in the order given."""
        a = qmath.ket_to_density(qmath.basis_ket([1]))
        b = qmath.ket_to_density(qmath.basis_ket([0]))
        c = np.eye(2) / 2
        rho = qmath.kron_all(a, b, c)
        np.testing.assert_allclose(qmath.partial_trace(rho, [1, 0]), np.kron(b, a))

    def test_requires_kept_qubit(self):
        """Test that an empty keep list is rejected."""
        with pytest.raises(ValueError, match="at least one"):
            qmath.partial_trace(np.eye(2) / 2, [])


@pytest.mark.unit
class TestKets:
    """Test the statevector helpers."""

    def test_tensor_ket_matches_density_path(self, rng):
        """Test a ket placed on interleaved qubits."""
        a = qmath.random_ket(2, rng)
        b = qmath.random_ket(2, rng)
        ket = qmath.tensor_ket([a, b], [(0, 2), (1, 3)], 4)
        rho = qmath.ket_to_density(ket)
        np.testing.assert_allclose(
            qmath.partial_trace(rho, [0, 2]), qmath.ket_to_density(a), atol=1e-12
        )

    def test_apply_unitary_ket(self, rng):
        """Test the statevector path against the density path."""
        ket = qmath.random_ket(3, rng)
        u = qmath.random_unitary(4, rng)
        out = qmath.apply_unitary_ket(ket, u, [1, 2])
        np.testing.assert_allclose(
            qmath.ket_to_density(out),
            qmath.apply_unitary(qmath.ket_to_density(ket), u, [1, 2]),
            atol=1e-12,
        )
        np.testing.assert_allclose(qmath.ket_probabilities(out).sum(), 1.0)


@pytest.mark.unit
class TestEig3:
    """Test the symmetric 3x3 eigenvalue helper."""

    def test_descending(self):
        """Test eigenvalues come back in descending order."""
        assert qmath.eig3_sym_desc(np.diag([0.2, 0.9, -0.4])) == pytest.approx(
            (0.9, 0.2, -0.4)
        )

    def test_rejects_asymmetric(self):
        """Test that asymmetric input is rejected."""
        with pytest.raises(ValueError, match="not symmetric"):
            qmath.eig3_sym_desc(np.triu(np.ones((3, 3))))
