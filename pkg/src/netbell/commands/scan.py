"""``netbell scan``: optimize at every gamma of a grid.

Writes ``<prefix>_<network>_<prep>_<meas>_scan.csv`` (gamma, best score,
oracle score, restarts) and a JSON file with the best settings per gamma.
"""

import argparse
import logging

from ..optimizers.reports import scan_record, write_json, write_scan_csv
from ..optimizers.scan import scan
from ..processors.config_processor import RunConfig
from ..utils import create_output_dir, format_gamma, format_score
from .run_options import EXIT_OK, add_run_arguments, load_run_config

logger = logging.getLogger(__name__)


def cmd_scan(config: RunConfig, workers: int | None = None) -> int:
    """Run a noise scan and write its files."""
    result = scan(
        config.network,
        config.gammas,
        config.noise_model,
        config.placement,
        config.optimizer,
        preparation=config.preparation,
        measurement=config.measurement,
        inequality=config.inequality,
        simulation=config.simulation,
        shots=config.shots,
        seed=config.shot_seed,
        workers=workers,
    )

    output_dir = create_output_dir(config.output_dir)
    csv_path = write_scan_csv(
        result, output_dir / f"{config.file_stem}_scan.csv", config.raw
    )
    json_path = write_json(
        scan_record(result, config.raw), output_dir / f"{config.file_stem}_scan.json"
    )

    print(f"🔍 Scan of {result.network_id} under {result.model} noise")
    if result.warm_start:
        print("   warm start: each gamma starts from the previous best settings")
    for point in result.points:
        oracle = format_score(point.oracle_score) or "-"
        print(
            f"   gamma={format_gamma(point.gamma)}  "
            f"best={format_score(point.best_score)}  oracle={oracle}"
        )
    critical = result.critical_gamma()
    if critical is None:
        print("✅ Violation persists across the grid")
    else:
        print(f"⚠️  Score reaches the classical bound near gamma={critical:.6f}")
    print(f"   scan: {csv_path}")
    print(f"   settings: {json_path}")
    return EXIT_OK


def add_parser(subparsers) -> argparse.ArgumentParser:
    """Register the ``scan`` subcommand."""
    parser = subparsers.add_parser(
        "scan",
        help="Maximize a Bell score over a grid of noise parameters",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s --network bilocal --noise dephasing --gamma-grid 0 1 0.05
  %(prog)s --network star:3 --noise depolarizing_source --gamma-grid 0 0.5 0.05
  %(prog)s --network chsh --noise amplitude_damping \\
      --preparation nonmaximally_entangled_state_preparation \\
      --gamma-grid 0.25 0.35 0.001 --warm-start
        """,
    )
    add_run_arguments(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    """Entry point of the ``scan`` subcommand."""
    config = load_run_config(args)
    if isinstance(config, int):
        return config
    return cmd_scan(config, args.workers)
