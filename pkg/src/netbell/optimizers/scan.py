"""Noise-parameter scans: one multi-restart optimization per gamma."""

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..scores.bell import BellInequality, get_inequality
from ..scores.oracle import UnsupportedCurveError, curve
from ..simulators.ansatz import NetworkAnsatz, build_ansatz
from ..simulators.channels import CHANNEL_FACTORIES, NoiseModel, check_gamma
from ..simulators.network import Network, build_network
from ..utils import worker_count
from .descent import OptimizationResult, OptimizerConfig, optimize
from .objective import BellObjective

logger = logging.getLogger(__name__)

GRID_DECIMALS = 12
BELL_PREPARATIONS = (
    "phi_plus_state_preparation",
    "psi_plus_state_preparation",
    "maximally_entangled_state_preparation",
)
PRODUCT_MEASUREMENTS = (
    "local_ry_measurement",
    "arbitrary_local_measurement",
    "computational_basis_measurement",
)


def gamma_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid ``start, start + step, ..., <= stop``."""
    start, stop = check_gamma(start, "grid start"), check_gamma(stop, "grid stop")
    if not step > 0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"grid stop {stop} lies below grid start {start}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), GRID_DECIMALS)


def check_grid(gammas: Sequence[float]) -> np.ndarray:
    """Validate a gamma grid: non-empty, inside ``[0, 1]``, strictly increasing."""
    grid = np.asarray(gammas, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("gamma grid is empty")
    for g in grid:
        check_gamma(g)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("gamma grid must be strictly increasing")
    return grid


@dataclass
class ScanPoint:
    """Best result of the optimization at one gamma."""

    gamma: float
    best_score: float
    best_settings: np.ndarray
    oracle_score: float | None
    restarts_used: int
    warm_started: bool = False
    precision: float = 0.0


@dataclass
class ScanResult:
    """Per-gamma best scores of one (network, ansatz, noise) combination."""

    network_id: str
    inequality_id: str
    model: str
    placement: object
    preparation: object
    measurement: object
    classical_bound: float
    points: list[ScanPoint] = field(default_factory=list)
    warm_start: bool = False

    @property
    def gammas(self) -> np.ndarray:
        """The gamma grid."""
        return np.array([p.gamma for p in self.points])

    @property
    def best_scores(self) -> np.ndarray:
        """Best score per gamma."""
        return np.array([p.best_score for p in self.points])

    @property
    def oracle_scores(self) -> np.ndarray:
        """Oracle value per gamma, NaN where no closed form applies."""
        return np.array(
            [np.nan if p.oracle_score is None else p.oracle_score for p in self.points]
        )

    def critical_gamma(self, bound: float | None = None) -> float | None:
        """First gamma where the best score drops to ``bound``.

        Linearly interpolated between grid points; ``None`` when the score
        stays above the bound across the grid.
        """
        bound = self.classical_bound if bound is None else bound
        gammas, scores = self.gammas, self.best_scores
        below = np.nonzero(scores <= bound)[0]
        if below.size == 0:
            return None
        k = int(below[0])
        if k == 0:
            return float(gammas[0])
        g0, g1, s0, s1 = gammas[k - 1], gammas[k], scores[k - 1], scores[k]
        return float(g0 + (s0 - bound) * (g1 - g0) / (s0 - s1))


def _names(ansatz: NetworkAnsatz) -> tuple[list[str], list[str]]:
    return (
        [p.name for p in ansatz.preparations],
        [m.name for m in ansatz.measurements],
    )


def oracle_value(
    ansatz: NetworkAnsatz,
    inequality: BellInequality,
    model: str,
    placement: object,
    gamma: float,
) -> float | None:
    """Closed-form maximum for this scan point, on the inequality's scale.

    ``None`` when no closed form covers the noise model, the placement or
    the preparation and measurement families of ``ansatz``. The curves assume
    Bell-pair sources, so classical or arbitrary sources never get one.
    Detector noise only post-processes outcomes and keeps any measurement.
    """
    preps, meas = _names(ansatz)
    if not isinstance(placement, str) or model == "none":
        return None
    network = ansatz.network
    if any(p not in BELL_PREPARATIONS for p in preps):
        return None
    if model != "white_noise_detector" and any(
        name not in PRODUCT_MEASUREMENTS for name in meas
    ):
        return None
    preparation = "phi_plus_state_preparation"
    if model == "colored":
        if len(set(preps)) != 1 or preps[0] not in BELL_PREPARATIONS[:2]:
            return None
        preparation = preps[0]
    try:
        value = curve(model, network.kind, placement, gamma, network.n, preparation)
    except UnsupportedCurveError:
        return None
    return value * inequality.unit_scale


@dataclass(frozen=True)
class _PointJob:
    objective: BellObjective
    config: OptimizerConfig
    gamma: float
    oracle: float | None
    initial: np.ndarray | None = None


def _run_point(job: _PointJob, workers: int = 1) -> ScanPoint:
    result: OptimizationResult = optimize(
        job.objective, job.config, job.initial, workers=workers
    )
    best = result.best_trace
    logger.info(
        "gamma %.6f: best score %.10f (oracle %s)",
        job.gamma,
        best.best_score,
        job.oracle,
    )
    return ScanPoint(
        gamma=job.gamma,
        best_score=best.best_score,
        best_settings=best.best_settings.copy(),
        oracle_score=job.oracle,
        restarts_used=len(result.traces),
        warm_started=job.initial is not None,
        precision=best.final_step_change(),
    )


def scan(
    network: Network | str,
    gammas: Sequence[float],
    model: str,
    placement: object = "uniform",
    config: OptimizerConfig | None = None,
    preparation: str | Sequence[str] = "phi_plus_state_preparation",
    measurement: str | Sequence[str] = "local_ry_measurement",
    inequality: BellInequality | str | None = None,
    simulation: str = "mixed",
    shots: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> ScanResult:
    """Optimize the Bell score independently at every gamma of the grid.

    With ``config.warm_start`` the points run in order and restart 0 of
    each point starts from the previous point's best settings. Otherwise
    the points are independent and run in parallel over ``workers``
    processes.
    """
    network_id = network if isinstance(network, str) else network.id
    network = build_network(network) if isinstance(network, str) else network
    grid = check_grid(gammas)
    config = config or OptimizerConfig()
    if isinstance(inequality, str):
        inequality = get_inequality(inequality)
    elif inequality is None:
        inequality = get_inequality(network_id)
    if model != "none" and model not in CHANNEL_FACTORIES:
        raise ValueError(
            f"unknown noise model {model!r}; "
            f"available: none, {', '.join(CHANNEL_FACTORIES)}"
        )
    ansatz = build_ansatz(network, preparation, measurement)

    jobs = []
    for gamma in grid:
        noise = NoiseModel.from_placement(model, gamma, placement, network.topology)
        objective = BellObjective(ansatz, inequality, noise, simulation, shots, seed)
        oracle = oracle_value(ansatz, inequality, model, placement, float(gamma))
        jobs.append(_PointJob(objective, config, float(gamma), oracle))

    workers = worker_count(workers)
    points: list[ScanPoint] = []
    if config.warm_start:
        initial = None
        for job in jobs:
            point = _run_point(replace(job, initial=initial), workers)
            initial = point.best_settings
            points.append(point)
    elif workers == 1 or len(jobs) == 1:
        points = [_run_point(job, workers) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            points = list(pool.map(_run_point, jobs))

    return ScanResult(
        network_id=network_id,
        inequality_id=inequality.id,
        model=model,
        placement=placement,
        preparation=preparation,
        measurement=measurement,
        classical_bound=inequality.classical_bound,
        points=points,
        warm_start=config.warm_start,
    )
