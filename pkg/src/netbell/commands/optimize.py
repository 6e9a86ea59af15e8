"""``netbell optimize``: best-of-restarts gradient descent at one noise level.

Writes ``<prefix>_<network>_<prep>_<meas>_trace.csv`` with one row per step
of the winning restart and ``..._best.json`` with the best settings.
"""

import argparse
import logging

from ..optimizers.descent import optimize
from ..optimizers.objective import BellObjective
from ..optimizers.reports import (
    best_settings_record,
    write_json,
    write_trace_csv,
)
from ..processors.config_processor import RunConfig
from ..scores.bell import get_inequality
from ..simulators.ansatz import build_ansatz
from ..simulators.channels import NoiseModel
from ..simulators.network import build_network
from ..utils import create_output_dir, format_score
from .run_options import EXIT_INVALID, EXIT_OK, add_run_arguments, load_run_config

logger = logging.getLogger(__name__)


def build_objective(config: RunConfig, gamma: float) -> BellObjective:
    """Objective of a resolved configuration at one noise level."""
    network = build_network(config.network)
    ansatz = build_ansatz(network, config.preparation, config.measurement)
    noise = NoiseModel.from_placement(
        config.noise_model, gamma, config.placement, network.topology
    )
    return BellObjective(
        ansatz,
        get_inequality(config.inequality),
        noise,
        config.simulation,
        config.shots,
        config.shot_seed,
    )


def cmd_optimize(config: RunConfig, workers: int | None = None) -> int:
    """Run one optimization and write its trace and best settings."""
    gammas = config.gammas
    if len(gammas) != 1:
        print("❌ (noise.gamma) optimize takes a single gamma; use scan for grids")
        return EXIT_INVALID
    objective = build_objective(config, gammas[0])
    result = optimize(objective, config.optimizer, workers=workers)

    output_dir = create_output_dir(config.output_dir)
    trace_path = write_trace_csv(
        result, output_dir / f"{config.file_stem}_trace.csv", config.raw
    )
    best_path = write_json(
        best_settings_record(result, config.raw),
        output_dir / f"{config.file_stem}_best.json",
    )

    score = objective.inequality.score(objective.correlators(result.best_settings))
    status = "✅ VIOLATION" if score.violated else "⚠️  NO VIOLATION"
    print(f"{status}: best score {format_score(score.value)}")
    print(
        f"   classical bound {format_score(score.classical_bound)}, "
        f"quantum bound {format_score(score.quantum_bound)}"
    )
    print(f"   restart {result.best_restart} of {len(result.traces)}")
    print(f"   trace: {trace_path}")
    print(f"   best settings: {best_path}")
    return EXIT_OK


def add_parser(subparsers) -> argparse.ArgumentParser:
    """Register the ``optimize`` subcommand."""
    parser = subparsers.add_parser(
        "optimize",
        help="Maximize a Bell score at one noise level",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s --network chsh                       # Noiseless CHSH, hardware ansatz
  %(prog)s --network chain:3 --steps 50         # 3-chain, longer descent
  %(prog)s --config run.yml --gamma 0.3         # Config file with a flag override
  %(prog)s --network bilocal --dump-config      # Print the resolved config
        """,
    )
    add_run_arguments(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    """Entry point of the ``optimize`` subcommand."""
    config = load_run_config(args)
    if isinstance(config, int):
        return config
    return cmd_optimize(config, args.workers)
