"""Run-configuration flags shared by ``optimize`` and ``scan``."""

import argparse
import logging
from typing import Any

from ..processors.config_processor import (
    ConfigError,
    RunConfig,
    apply_overrides,
    dump_config,
    load_config_file,
    resolve_config,
)
from ..validators.base_validator import ValidationLevel
from ..validators.config_validator import RunConfigValidator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ACCEPTANCE = 2


def _names(text: str) -> str | list[str]:
    """One name, or comma-separated names (one per source or node)."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return parts[0] if len(parts) == 1 else parts


def _placement(text: str) -> str | list[int]:
    """``single``, ``uniform`` or comma-separated element indices."""
    if text in ("single", "uniform"):
        return text
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        return text


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    """Register the run-configuration flags; flags override the config file."""
    parser.add_argument("--config", help="YAML run configuration file")
    parser.add_argument("--network", help="chsh, bilocal, star:n or chain:n")
    parser.add_argument("--inequality", help="Inequality id (default: network)")
    parser.add_argument(
        "--preparation", type=_names, help="Preparation ansatz, or one per source"
    )
    parser.add_argument(
        "--measurement", type=_names, help="Measurement ansatz, or one per node"
    )
    parser.add_argument("--noise", help="Noise model name or none")
    parser.add_argument(
        "--placement", type=_placement, help="single, uniform or element indices"
    )
    parser.add_argument("--gamma", type=float, help="Single noise parameter")
    parser.add_argument(
        "--gamma-grid",
        nargs=3,
        type=float,
        metavar=("START", "STOP", "STEP"),
        help="Noise parameter grid",
    )
    parser.add_argument("--simulation", help="mixed or ancilla")
    parser.add_argument("--step-size", type=float, help="Gradient-descent step size")
    parser.add_argument("--steps", type=int, help="Gradient-descent steps")
    parser.add_argument("--restarts", type=int, help="Random restarts")
    parser.add_argument("--gradient", help="parameter_shift or central_difference")
    parser.add_argument("--seed", type=int, help="Restart seed")
    parser.add_argument(
        "--warm-start",
        action="store_true",
        default=None,
        help="Seed each gamma from the previous best settings",
    )
    parser.add_argument("--shots", type=int, help="Estimate from this many shots")
    parser.add_argument("--shot-seed", type=int, help="Seed of the shot sampler")
    parser.add_argument("--output-dir", help="Output directory")
    parser.add_argument("--prefix", help="Output file prefix")
    parser.add_argument("--workers", type=int, help="Worker processes")
    parser.add_argument(
        "--dump-config",
        action="store_true",
        help="Print the resolved configuration as YAML and exit",
    )


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Dotted-key overrides for every flag that was given."""
    overrides: dict[str, Any] = {
        "network": args.network,
        "inequality": args.inequality,
        "ansatz.preparation": args.preparation,
        "ansatz.measurement": args.measurement,
        "noise.model": args.noise,
        "noise.placement": args.placement,
        "noise.gamma": args.gamma,
        "noise.simulation": args.simulation,
        "optimizer.step_size": args.step_size,
        "optimizer.num_steps": args.steps,
        "optimizer.restarts": args.restarts,
        "optimizer.gradient": args.gradient,
        "optimizer.seed": args.seed,
        "optimizer.warm_start": args.warm_start,
        "mode.seed": args.shot_seed,
        "output.directory": args.output_dir,
        "output.prefix": args.prefix,
    }
    if args.gamma_grid is not None:
        start, stop, step = args.gamma_grid
        overrides["noise.gamma"] = {"start": start, "stop": stop, "step": step}
    if args.shots is not None:
        overrides["mode.kind"] = "shots"
        overrides["mode.shots"] = args.shots
    return overrides


def load_run_config(args: argparse.Namespace) -> RunConfig | int:
    """Resolve and validate the run configuration.

    Returns the configuration, or an exit code when the run should stop:
    ``0`` after ``--dump-config`` and ``1`` on invalid input.
    """
    try:
        raw = load_config_file(args.config) if args.config else {}
    except ConfigError as e:
        print(f"❌ {e}")
        return EXIT_INVALID

    resolved = resolve_config(apply_overrides(raw, overrides_from_args(args)))
    result = RunConfigValidator(resolved).validate()
    for issue in result.errors:
        marker = "❌" if issue.level is ValidationLevel.ERROR else "⚠️ "
        print(f"{marker} {issue}")
    if result.has_errors:
        print(f"❌ Configuration invalid: {', '.join(result.fields())}")
        return EXIT_INVALID

    if args.dump_config:
        print(dump_config(resolved), end="")
        return EXIT_OK
    return RunConfig.from_mapping(resolved)
