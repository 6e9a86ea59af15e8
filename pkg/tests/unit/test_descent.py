"""Unit tests for gradient descent with restarts."""

import numpy as np
import pytest

from netbell.optimizers.descent import (
    OptimizationResult,
    OptimizationTrace,
    OptimizerConfig,
    default_step_size,
    gradient_descent,
    optimize,
    optimize_fixed_state,
)
from netbell.optimizers.objective import BellObjective
from netbell.scores.bell import get_inequality
from netbell.scores.oracle import horodecki_max_chsh
from netbell.simulators import qmath
from netbell.simulators.ansatz import optimal_settings


@pytest.fixture
def chsh_objective(chsh_ansatz):
    """Noiseless CHSH objective."""
    return BellObjective(chsh_ansatz, get_inequality("chsh"))


def trace_of(scores):
    """Trace with the given scores and dummy settings."""
    scores = np.asarray(scores, dtype=float)
    return OptimizationTrace(
        scores, np.zeros_like(scores), np.arange(scores.size)[:, None] * 1.0
    )


@pytest.mark.unit
class TestOptimizerConfig:
    """Test hyperparameter validation."""

    @pytest.mark.parametrize(
        ("field", "value", "message"),
        [
            ("step_size", 0.0, "step_size"),
            ("num_steps", 0, "num_steps"),
            ("restarts", 0, "restarts"),
            ("gradient", "adam", "gradient"),
        ],
    )
    def test_rejects(self, field, value, message):
        """Test out-of-range values."""
        with pytest.raises(ValueError, match=message):
            OptimizerConfig(**{field: value})

    def test_default_step_sizes(self):
        """Test tuned and fallback step sizes."""
        assert default_step_size("chsh") == 0.12
        assert default_step_size("star:1") == 0.24
        assert default_step_size("Bilocal") == 1.4
        assert default_step_size("star:5") == 1.6


@pytest.mark.unit
class TestTrace:
    """Test trace bookkeeping."""

    def test_best_is_first_maximum(self):
        """Test that the earliest best step wins."""
        trace = trace_of([0.1, 0.5, 0.3, 0.5])
        assert trace.best_index == 1
        assert trace.best_score == 0.5
        assert trace.best_settings[0] == 1.0

    def test_best_so_far(self):
        """Test the running maximum."""
        trace = trace_of([0.1, 0.5, 0.3, 0.6])
        np.testing.assert_allclose(trace.best_so_far(), [0.1, 0.5, 0.5, 0.6])
        assert trace.final_step_change() == pytest.approx(0.3)
        assert trace_of([0.2]).final_step_change() == 0.0

    def test_best_restart_ties(self):
        """Test that the lowest restart wins a tie."""
        result = OptimizationResult(
            [trace_of([0.1, 0.7]), trace_of([0.7, 0.2]), trace_of([0.3])]
        )
        assert result.best_restart == 0
        assert result.best_score == 0.7


@pytest.mark.unit
class TestGradientDescent:
    """Test single descents."""

    def test_trace_length(self, chsh_objective):
        """Test that the initial point and every step are recorded."""
        config = OptimizerConfig(step_size=0.12, num_steps=5, restarts=1)
        trace = gradient_descent(chsh_objective, config)
        assert trace.scores.shape == (6,)
        assert trace.grad_norms.shape == (6,)
        assert trace.settings.shape == (6, chsh_objective.num_params)

    def test_initial_point(self, chsh_objective, rng):
        """Test that a given initial point is used."""
        initial = chsh_objective.random_settings(rng)
        config = OptimizerConfig(step_size=0.12, num_steps=2)
        trace = gradient_descent(chsh_objective, config, initial)
        np.testing.assert_allclose(trace.settings[0], initial)
        assert trace.scores[0] == pytest.approx(chsh_objective.score(initial))

    def test_initial_shape(self, chsh_objective):
        """Test the initial settings length check."""
        with pytest.raises(ValueError, match="expected 4"):
            gradient_descent(chsh_objective, OptimizerConfig(), [0.0, 1.0])

    def test_improves_near_optimum(self, chsh_ansatz, chsh_objective, rng):
        """Test that descent climbs back towards 2 sqrt(2)."""
        values = optimal_settings(chsh_ansatz).values
        start = values + rng.normal(0.0, 0.3, values.size)
        config = OptimizerConfig(step_size=0.12, num_steps=60)
        trace = gradient_descent(chsh_objective, config, start)
        assert trace.scores[-1] > trace.scores[0]
        assert trace.best_score <= 2 * np.sqrt(2) + 1e-9

    def test_stationary_at_optimum(self, chsh_ansatz, chsh_objective):
        """Test that the optimum is a fixed point."""
        values = optimal_settings(chsh_ansatz).values
        config = OptimizerConfig(step_size=0.12, num_steps=3)
        trace = gradient_descent(chsh_objective, config, values)
        np.testing.assert_allclose(trace.scores, 2 * np.sqrt(2), atol=1e-10)


@pytest.mark.unit
class TestOptimize:
    """Test restarts."""

    def test_restart_count(self, chsh_objective):
        """Test one trace per restart in order."""
        config = OptimizerConfig(step_size=0.12, num_steps=3, restarts=3, seed=7)
        result = optimize(chsh_objective, config)
        assert [t.restart for t in result.traces] == [0, 1, 2]

    def test_deterministic(self, chsh_objective):
        """Test that a seed reproduces every trace."""
        config = OptimizerConfig(step_size=0.12, num_steps=4, restarts=2, seed=11)
        first = optimize(chsh_objective, config)
        second = optimize(chsh_objective, config)
        for a, b in zip(first.traces, second.traces, strict=True):
            np.testing.assert_array_equal(a.scores, b.scores)
            np.testing.assert_array_equal(a.settings, b.settings)

    def test_restarts_differ(self, chsh_objective):
        """Test independent initial settings per restart."""
        config = OptimizerConfig(step_size=0.12, num_steps=1, restarts=2, seed=3)
        result = optimize(chsh_objective, config)
        first, second = (t.settings[0] for t in result.traces)
        assert not np.allclose(first, second)

    def test_warm_start_first_restart(self, chsh_ansatz, chsh_objective):
        """Test that only restart 0 uses the initial point."""
        values = optimal_settings(chsh_ansatz).values
        config = OptimizerConfig(step_size=0.12, num_steps=1, restarts=2)
        result = optimize(chsh_objective, config, values)
        np.testing.assert_allclose(result.traces[0].settings[0], values)
        assert result.best_restart == 0
        assert result.best_score == pytest.approx(2 * np.sqrt(2))


@pytest.mark.unit
class TestFixedState:
    """Test measurement-only optimization."""

    def test_bounded_by_horodecki(self):
        """Test that a Werner state never exceeds its Horodecki value."""
        bell = qmath.ket_to_density(qmath.PHI_PLUS)
        rho = 0.8 * bell + 0.2 * np.eye(4) / 4
        config = OptimizerConfig(step_size=0.12, num_steps=10, restarts=2)
        result = optimize_fixed_state(rho, config)
        assert result.best_score <= horodecki_max_chsh(rho) + 1e-9
        assert result.best_trace.settings.shape[1] == 12
