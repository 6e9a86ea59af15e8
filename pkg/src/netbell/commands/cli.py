"""Entry point of the ``netbell`` command."""

import argparse
import logging
import sys

from .. import __version__
from . import optimize, oracle, scan, verify

SUBCOMMANDS = (optimize, scan, oracle, verify)


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subparser per subcommand."""
    parser = argparse.ArgumentParser(
        prog="netbell",
        description="Noisy quantum network simulation and Bell-score optimization",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s optimize --network chsh           # Noiseless CHSH
  %(prog)s scan --network bilocal --noise dephasing --gamma-grid 0 1 0.05
  %(prog)s oracle classical-star n=3 k=1     # Closed-form maximum
  %(prog)s verify --quick                    # Acceptance criteria

Environment:
  NETBELL_WORKERS     worker processes (default 1)
  NETBELL_OUTPUT_DIR  output directory (default ./output)
        """,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress (-v) or per-step detail (-vv)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in SUBCOMMANDS:
        module.add_parser(subparsers)
    return parser


def configure_logging(verbosity: int) -> None:
    """WARNING by default, INFO with ``-v``, DEBUG with ``-vv``."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")


def main(argv: list[str] | None = None) -> None:
    """Parse arguments, run the subcommand and exit with its code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    sys.exit(args.handler(args))


if __name__ == "__main__":
    main()
