"""Unit tests for the closed-form maxima."""

import numpy as np
import pytest

from netbell.scores.oracle import (
    UnsupportedCurveError,
    amplitude_damping_breaking,
    bell_state_prediction,
    classical_source_star_score,
    correlation_matrix_T,
    curve,
    horodecki_max_chsh,
    max_chain_score,
    max_star_score,
    maxent_gridsearch_oracle,
    maxent_state,
)
from netbell.simulators import qmath
from netbell.simulators.channels import (
    amplitude_damping,
    apply_channel,
    colored_noise_map,
)

PHI_PLUS = qmath.ket_to_density(qmath.PHI_PLUS)


def werner(visibility):
    """``|Phi+>`` mixed with white noise."""
    return visibility * PHI_PLUS + (1 - visibility) * np.eye(4) / 4


@pytest.mark.unit
class TestHorodecki:
    """Test the two-qubit CHSH maximum."""

    def test_correlation_matrix(self):
        """Test T for |Phi+>."""
        np.testing.assert_allclose(
            correlation_matrix_T(PHI_PLUS), np.diag([1.0, -1.0, 1.0]), atol=1e-12
        )

    def test_bell_states(self):
        """Test every Bell state reaches 2 sqrt(2)."""
        for ket in (qmath.PHI_PLUS, qmath.PHI_MINUS, qmath.PSI_PLUS, qmath.PSI_MINUS):
            assert horodecki_max_chsh(qmath.ket_to_density(ket)) == pytest.approx(
                2 * np.sqrt(2)
            )

    @pytest.mark.parametrize("v", [0.0, 0.5, 1 / np.sqrt(2), 0.9])
    def test_werner(self, v):
        """Test the linear visibility dependence."""
        assert horodecki_max_chsh(werner(v)) == pytest.approx(2 * np.sqrt(2) * v)

    def test_product_state(self):
        """Test that |00> stays at the local bound."""
        rho = qmath.ket_to_density(qmath.basis_ket([0, 0]))
        assert horodecki_max_chsh(rho) == pytest.approx(2.0)

    def test_rejects_wrong_size(self):
        """Test the two-qubit check."""
        with pytest.raises(ValueError, match="two-qubit"):
            correlation_matrix_T(np.eye(2) / 2)


@pytest.mark.unit
class TestNetworkMaxima:
    """Test star and chain maxima for given sources."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_star_werner(self, n):
        """Test sqrt(2) v for identical Werner sources."""
        assert max_star_score([werner(0.8)] * n, n) == pytest.approx(np.sqrt(2) * 0.8)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_chain_werner(self, n):
        """Test sqrt(2) v^(n/2) for identical Werner sources."""
        assert max_chain_score([werner(0.8)] * n, n) == pytest.approx(
            np.sqrt(2) * 0.8 ** (n / 2)
        )

    def test_source_count(self):
        """Test that one state per source is required."""
        with pytest.raises(ValueError, match="expected 3 source states"):
            max_star_score([PHI_PLUS], 3)

    def test_classical_sources(self):
        """Test sqrt(2)^((n - k)/n)."""
        assert classical_source_star_score(3, 1) == pytest.approx(1.25992104989)
        assert classical_source_star_score(4, 0) == pytest.approx(np.sqrt(2))
        assert classical_source_star_score(4, 4) == pytest.approx(1.0)
        with pytest.raises(ValueError, match="k must lie"):
            classical_source_star_score(2, 3)

    def test_amplitude_damping_breaking(self):
        """Test the threshold (1 - g1)(1 - g2) <= 1/2."""
        assert amplitude_damping_breaking(0.3, 0.3)
        assert not amplitude_damping_breaking(0.29, 0.29)
        edge = 1 - 1 / np.sqrt(2)
        assert amplitude_damping_breaking(edge, edge)
        assert amplitude_damping_breaking(0.0, 0.5)
        with pytest.raises(ValueError, match="gamma1"):
            amplitude_damping_breaking(1.2, 0.0)


@pytest.mark.unit
class TestCurves:
    """Test the noise-robustness curves."""

    def test_uniform_dephasing(self):
        """Test sqrt(1 + (1 - gamma)^2) for any star size."""
        assert curve("dephasing", "star", "uniform", 0.5) == pytest.approx(
            1.11803398875
        )
        assert curve("dephasing", "chain:4", "uniform", 0.5) == pytest.approx(
            np.sqrt(1.25)
        )

    @pytest.mark.parametrize("n", [1, 3])
    def test_source_depolarizing(self, n):
        """Test uniform and single source depolarizing."""
        v = 1 - 16 * 0.2 / 15
        assert curve("depolarizing_source", "star", "uniform", 0.2, n) == (
            pytest.approx(np.sqrt(2) * v)
        )
        assert curve("depolarizing_source", "star", "single", 0.2, n) == (
            pytest.approx(np.sqrt(2) * v ** (1 / n))
        )

    def test_qubit_depolarizing(self):
        """Test uniform qubit depolarizing on the bilocal network."""
        assert curve("depolarizing_qubit", "bilocal", "uniform", 0.1) == (
            pytest.approx(np.sqrt(2) * (1 - 0.4 / 3) ** 2)
        )

    def test_detector_white_noise(self):
        """Test every detector of a 3-star flipping with probability gamma."""
        assert curve("white_noise_detector", "star:3", "uniform", 0.1) == (
            pytest.approx(np.sqrt(2) * 0.9 ** (4 / 3))
        )

    def test_colored_noise_depends_on_preparation(self):
        """Test Phi+ and Psi+ sources under colored noise."""
        phi = curve("colored", "chsh", "uniform", 0.4)
        psi = curve(
            "colored", "chsh", "uniform", 0.4, preparation="psi_plus_state_preparation"
        )
        assert phi == pytest.approx(np.sqrt(2) * 0.6)
        assert psi == pytest.approx(np.sqrt(1 + 0.36))

    def test_uniform_chain_interior_sources(self):
        """Test multi-source chains against the product-measurement maximum."""
        v = 1 - 16 * 0.2 / 15
        assert curve("depolarizing_source", "chain:3", "uniform", 0.2) == (
            pytest.approx(np.sqrt(2) * v**1.5)
        )
        noisy = colored_noise_map(PHI_PLUS, 0.4)
        assert curve("colored", "chain:3", "uniform", 0.4) == pytest.approx(
            max_chain_score([noisy] * 3, 3)
        )
        assert curve("colored", "chain:3", "uniform", 0.4) == pytest.approx(
            np.sqrt(0.432)
        )

    def test_uniform_chain_with_unequal_eigenvalues(self):
        """Test that interior Psi+ sources under colored noise lose nothing."""
        psi = curve(
            "colored",
            "chain:3",
            "uniform",
            0.4,
            preparation="psi_plus_state_preparation",
        )
        assert psi == pytest.approx(np.sqrt(1.36))
        assert psi == pytest.approx(
            curve(
                "colored",
                "bilocal",
                "uniform",
                0.4,
                preparation="psi_plus_state_preparation",
            )
        )

    def test_conflicting_n(self):
        """Test that an explicit size must agree with n."""
        with pytest.raises(ValueError, match="conflicts"):
            curve("dephasing", "star:3", "single", 0.1, 4)

    @pytest.mark.parametrize(
        ("model", "placement", "preparation"),
        [
            ("amplitude_damping", "uniform", "phi_plus_state_preparation"),
            ("dephasing", "every", "phi_plus_state_preparation"),
            ("dephasing", "uniform", "arbitrary_state_preparation"),
        ],
    )
    def test_unsupported(self, model, placement, preparation):
        """Test combinations without a closed form."""
        with pytest.raises(UnsupportedCurveError):
            curve(model, "star", placement, 0.2, 2, preparation)

    def test_bell_state_prediction_matches_uniform_dephasing(self):
        """Test the naive prediction where it coincides with the curve."""
        assert bell_state_prediction("dephasing", "star", "uniform", 0.3, 3) == (
            pytest.approx(curve("dephasing", "star", "uniform", 0.3))
        )

    def test_bell_state_prediction_rejects_detectors(self):
        """Test that detector noise has no Bell-state prediction."""
        with pytest.raises(UnsupportedCurveError):
            bell_state_prediction("white_noise_detector", "star", "uniform", 0.3, 2)


@pytest.mark.unit
class TestGridSearch:
    """Test the maximally entangled grid search."""

    def test_noiseless(self):
        """Test that the grid reaches 2 sqrt(2) without noise."""
        result = maxent_gridsearch_oracle(resolution=8, refinements=0)
        assert result.score == pytest.approx(2 * np.sqrt(2))

    def test_at_least_bell_state_value(self):
        """Test the grid value against the unrotated Bell pair."""
        kraus = amplitude_damping(0.3)
        bell = PHI_PLUS
        for targets in ([0], [1]):
            bell = qmath.apply_kraus(bell, kraus, targets)
        result = maxent_gridsearch_oracle(kraus, kraus, resolution=12)
        assert result.score >= horodecki_max_chsh(bell) - 1e-12

    def test_angles_reproduce_score(self):
        """Test that the reported angles give the reported score."""
        kraus = amplitude_damping(0.3)
        result = maxent_gridsearch_oracle(kraus, kraus, resolution=10)
        rho = maxent_state(result.angles)
        noisy = apply_channel(rho, [np.kron(a, b) for a in kraus for b in kraus])
        assert horodecki_max_chsh(noisy) == pytest.approx(result.score, abs=1e-10)

    def test_resolution(self):
        """Test the resolution check."""
        with pytest.raises(ValueError, match="at least 2"):
            maxent_gridsearch_oracle(resolution=1)
