"""Plain gradient descent on the Bell cost with random restarts."""

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..scores.bell import get_inequality
from ..simulators.ansatz import (
    NetworkAnsatz,
    arbitrary_local_measurement,
    fixed_state_preparation,
)
from ..simulators.network import build_network
from ..utils import worker_count
from .gradients import GRADIENT_METHODS, correlator_jacobian, grad_central_difference
from .objective import BellObjective

logger = logging.getLogger(__name__)

DEFAULT_STEP_SIZES = {
    "chsh": 0.12,
    "star:1": 0.24,
    "bilocal": 1.4,
    "star:2": 1.4,
    "chain:2": 1.4,
}
FALLBACK_STEP_SIZE = 1.6
DEFAULT_NUM_STEPS = 30
DEFAULT_RESTARTS = 10


def default_step_size(network_id: str) -> float:
    """Step size used when a run does not set one."""
    return DEFAULT_STEP_SIZES.get(network_id.strip().lower(), FALLBACK_STEP_SIZE)


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient-descent hyperparameters."""

    step_size: float = FALLBACK_STEP_SIZE
    num_steps: int = DEFAULT_NUM_STEPS
    restarts: int = DEFAULT_RESTARTS
    gradient: str = "parameter_shift"
    seed: int = 0
    warm_start: bool = False

    def __post_init__(self):
        """Validate ranges."""
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.num_steps < 1:
            raise ValueError(f"num_steps must be at least 1, got {self.num_steps}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.gradient not in GRADIENT_METHODS:
            raise ValueError(
                f"gradient must be one of {', '.join(GRADIENT_METHODS)}, "
                f"got {self.gradient!r}"
            )


@dataclass
class OptimizationTrace:
    """Scores, gradient norms and settings at every step, initial point included."""

    scores: np.ndarray
    grad_norms: np.ndarray
    settings: np.ndarray
    restart: int = 0

    @property
    def best_index(self) -> int:
        """First step reaching the best score."""
        return int(np.argmax(self.scores))

    @property
    def best_score(self) -> float:
        """Highest score along the trace."""
        return float(self.scores[self.best_index])

    @property
    def best_settings(self) -> np.ndarray:
        """Settings at the best step."""
        return self.settings[self.best_index]

    def best_so_far(self) -> np.ndarray:
        """Running maximum of the score."""
        return np.maximum.accumulate(self.scores)

    def final_step_change(self) -> float:
        """Largest score change over the last step, an empirical precision."""
        if len(self.scores) < 2:
            return 0.0
        return float(abs(self.scores[-1] - self.scores[-2]))


def _score_and_gradient(
    objective: BellObjective, values: np.ndarray, method: str
) -> tuple[float, np.ndarray]:
    if method == "parameter_shift":
        correlators, jacobian = correlator_jacobian(objective, values)
        score = objective.score_from_correlators(correlators)
        grad = -jacobian.T @ objective.inequality.score_gradient(correlators)
        return score, grad
    return objective.score(values), grad_central_difference(objective.cost, values)


def gradient_descent(
    objective: BellObjective,
    config: OptimizerConfig,
    initial: Sequence[float] | None = None,
    rng: np.random.Generator | None = None,
    restart: int = 0,
) -> OptimizationTrace:
    """Run ``config.num_steps`` updates ``theta <- theta - eta * grad(cost)``.

    Starts from ``initial`` when given, otherwise from uniform random
    settings drawn from ``rng``.
    """
    if initial is None:
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        values = objective.random_settings(rng)
    else:
        values = np.array(initial, dtype=float)
        if values.shape != (objective.num_params,):
            raise ValueError(
                f"initial settings have {values.size} entries, "
                f"expected {objective.num_params}"
            )

    scores, norms, history = [], [], []
    for step in range(config.num_steps + 1):
        score, grad = _score_and_gradient(objective, values, config.gradient)
        scores.append(score)
        norms.append(float(np.linalg.norm(grad)))
        history.append(values.copy())
        logger.debug(
            "restart %d step %d: score %.10f |grad| %.3e",
            restart,
            step,
            score,
            norms[-1],
        )
        if step < config.num_steps:
            values = values - config.step_size * grad
    return OptimizationTrace(
        np.array(scores),
        np.array(norms),
        np.array(history).reshape(len(history), -1),
        restart,
    )


@dataclass
class OptimizationResult:
    """All restart traces of one optimization and the winning restart."""

    traces: list[OptimizationTrace] = field(default_factory=list)

    @property
    def best_restart(self) -> int:
        """Restart with the highest best score; the lowest index wins ties."""
        bests = [trace.best_score for trace in self.traces]
        return int(np.argmax(bests))

    @property
    def best_trace(self) -> OptimizationTrace:
        """Trace of the winning restart."""
        return self.traces[self.best_restart]

    @property
    def best_score(self) -> float:
        """Best score over all restarts."""
        return self.best_trace.best_score

    @property
    def best_settings(self) -> np.ndarray:
        """Settings reaching the best score."""
        return self.best_trace.best_settings


def _run_restart(
    args: tuple[BellObjective, OptimizerConfig, np.random.SeedSequence, int, object],
) -> OptimizationTrace:
    objective, config, seed_sequence, restart, initial = args
    rng = np.random.default_rng(seed_sequence)
    trace = gradient_descent(objective, config, initial, rng, restart)
    logger.info("restart %d finished: best score %.10f", restart, trace.best_score)
    return trace


def optimize(
    objective: BellObjective,
    config: OptimizerConfig,
    initial: Sequence[float] | None = None,
    workers: int | None = None,
) -> OptimizationResult:
    """Best of ``config.restarts`` independent gradient descents.

    Restart ``k`` draws its initial settings from the ``k``-th child of
    ``SeedSequence(config.seed)``. When ``initial`` is given, restart 0
    starts there instead.
    """
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    jobs = [
        (objective, config, child, k, initial if k == 0 else None)
        for k, child in enumerate(children)
    ]
    workers = min(worker_count(workers), config.restarts)
    if workers == 1:
        traces = [_run_restart(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_run_restart, jobs))
    return OptimizationResult(traces)


def optimize_fixed_state(
    rho: np.ndarray,
    config: OptimizerConfig,
    workers: int | None = None,
) -> OptimizationResult:
    """Measurement-only CHSH optimization on a fixed two-qubit state.

    Both nodes use arbitrary single-qubit measurements, so the best score
    approaches the Horodecki value of ``rho`` from below.
    """
    network = build_network("chsh")
    ansatz = NetworkAnsatz(
        network,
        (fixed_state_preparation(rho),),
        (arbitrary_local_measurement(1), arbitrary_local_measurement(1)),
    )
    objective = BellObjective(ansatz, get_inequality("chsh"))
    return optimize(objective, config, workers=workers)
