"""Command-line interface modules for netbell.

Each subcommand module exposes ``add_parser`` and a ``cmd_*`` function that
returns the exit code.
"""

from .cli import main
from .optimize import cmd_optimize
from .oracle import cmd_oracle
from .run_options import EXIT_ACCEPTANCE, EXIT_INVALID, EXIT_OK
from .scan import cmd_scan
from .verify import cmd_verify

__all__ = [
    "main",
    "cmd_optimize",
    "cmd_scan",
    "cmd_oracle",
    "cmd_verify",
    "EXIT_OK",
    "EXIT_INVALID",
    "EXIT_ACCEPTANCE",
]
