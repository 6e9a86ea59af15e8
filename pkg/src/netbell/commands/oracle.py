"""``netbell oracle``: evaluate a closed-form maximum.

Arguments after the formula id are positional words or ``key=value``
tokens, e.g. ``oracle classical-star n=3 k=1`` or
``oracle curve dephasing star uniform gamma=0.5``.
"""

import argparse
from collections.abc import Callable

import numpy as np

from ..scores.oracle import (
    amplitude_damping_breaking,
    classical_source_star_score,
    curve,
    horodecki_max_chsh,
    max_chain_score,
    max_star_score,
    maxent_gridsearch_oracle,
)
from ..simulators import qmath
from ..simulators.channels import make_channel
from ..utils import format_score
from .run_options import EXIT_INVALID, EXIT_OK

BELL_STATES = {
    "phi_plus": qmath.PHI_PLUS,
    "phi_minus": qmath.PHI_MINUS,
    "psi_plus": qmath.PSI_PLUS,
    "psi_minus": qmath.PSI_MINUS,
}


class OracleArguments:
    """Positional words and ``key=value`` options of one oracle call."""

    def __init__(self, tokens: list[str]):
        self.words: list[str] = []
        self.options: dict[str, str] = {}
        for token in tokens:
            if "=" in token:
                key, value = token.split("=", 1)
                self.options[key.strip().lower()] = value.strip()
            else:
                self.words.append(token)

    def word(self, index: int, name: str, default: str | None = None) -> str:
        """Positional word, or the option of the same name."""
        if name in self.options:
            return self.options[name]
        if index < len(self.words):
            return self.words[index]
        if default is None:
            raise ValueError(f"missing argument {name}")
        return default

    def number(self, name: str, default: float | None = None) -> float:
        """Real-valued option."""
        if name not in self.options:
            if default is None:
                raise ValueError(f"missing argument {name}=...")
            return default
        return float(self.options[name])

    def integer(self, name: str, default: int | None = None) -> int:
        """Integer option."""
        if name not in self.options:
            if default is None:
                raise ValueError(f"missing argument {name}=...")
            return default
        return int(self.options[name])


def _state(args: OracleArguments) -> np.ndarray:
    """Bell state mixed with white noise at ``visibility``."""
    name = args.word(0, "state", "phi_plus")
    if name not in BELL_STATES:
        available = ", ".join(BELL_STATES)
        raise ValueError(f"unknown state {name!r}; available: {available}")
    visibility = args.number("visibility", 1.0)
    pure = qmath.ket_to_density(BELL_STATES[name])
    return visibility * pure + (1 - visibility) * np.eye(4) / 4


def _classical_star(args: OracleArguments) -> float:
    return classical_source_star_score(args.integer("n"), args.integer("k"))


def _horodecki(args: OracleArguments) -> float:
    return horodecki_max_chsh(_state(args))


def _curve(args: OracleArguments) -> float:
    n = args.integer("n", 0) or None
    return curve(
        args.word(0, "model"),
        args.word(1, "network"),
        args.word(2, "placement", "uniform"),
        args.number("gamma"),
        n,
        args.options.get("preparation", "phi_plus_state_preparation"),
    )


def _max_star(args: OracleArguments) -> float:
    n = args.integer("n")
    return max_star_score([_state(args)] * n, n)


def _max_chain(args: OracleArguments) -> float:
    n = args.integer("n")
    return max_chain_score([_state(args)] * n, n)


def _breaking(args: OracleArguments) -> bool:
    gamma1 = args.number("gamma1", args.number("gamma", -1.0))
    gamma2 = args.number("gamma2", gamma1)
    return amplitude_damping_breaking(gamma1, gamma2)


def _maxent_grid(args: OracleArguments) -> float:
    model = args.word(0, "model", "amplitude_damping")
    gamma1 = args.number("gamma1", args.number("gamma", -1.0))
    gamma2 = args.number("gamma2", gamma1)
    channels = [make_channel(model, g, (0,)) for g in (gamma1, gamma2)]
    if any(not c.kraus for c in channels):
        raise ValueError(f"{model} is not a single-qubit Kraus channel")
    channel_a, channel_b = (list(c.kraus) for c in channels)
    resolution = args.integer("resolution", 24)
    return maxent_gridsearch_oracle(channel_a, channel_b, resolution).score


ORACLES: dict[str, tuple[Callable[[OracleArguments], float | bool], str]] = {
    "classical-star": (_classical_star, "n=<int> k=<int>"),
    "horodecki": (_horodecki, "state=<bell state> [visibility=<v>]"),
    "curve": (
        _curve,
        "<model> <network> <placement> gamma=<g> [n=<int>] [preparation=<name>]",
    ),
    "max-star": (_max_star, "n=<int> [state=<bell state>] [visibility=<v>]"),
    "max-chain": (_max_chain, "n=<int> [state=<bell state>] [visibility=<v>]"),
    "amplitude-damping-breaking": (_breaking, "gamma1=<g> [gamma2=<g>]"),
    "maxent-grid": (
        _maxent_grid,
        "[model] gamma1=<g> [gamma2=<g>] [resolution=<int>]",
    ),
}


def cmd_oracle(formula: str, tokens: list[str]) -> int:
    """Print one closed-form value with twelve significant digits.

    Predicates print ``true`` or ``false``.
    """
    if formula not in ORACLES:
        print(f"❌ Unknown oracle {formula!r}. Available oracles:")
        for name, (_, usage) in ORACLES.items():
            print(f"   {name} {usage}")
        return EXIT_INVALID
    function, usage = ORACLES[formula]
    try:
        value = function(OracleArguments(tokens))
    except ValueError as e:
        print(f"❌ {formula}: {e}")
        print(f"   usage: {formula} {usage}")
        return EXIT_INVALID
    if isinstance(value, bool):
        print("true" if value else "false")
    else:
        print(format_score(value))
    return EXIT_OK


def add_parser(subparsers) -> argparse.ArgumentParser:
    """Register the ``oracle`` subcommand."""
    parser = subparsers.add_parser(
        "oracle",
        help="Evaluate a closed-form maximum",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s classical-star n=3 k=1              # 1.25992104989
  %(prog)s horodecki state=phi_plus            # 2.82842712475
  %(prog)s curve dephasing star uniform gamma=0.5
  %(prog)s maxent-grid amplitude_damping gamma=0.3
        """,
    )
    parser.add_argument("formula", help=f"One of: {', '.join(ORACLES)}")
    parser.add_argument("arguments", nargs="*", help="Words and key=value options")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    """Entry point of the ``oracle`` subcommand."""
    return cmd_oracle(args.formula, args.arguments)
