"""Utility functions for netbell.

Environment handling, output directories and the number formats shared
by every emitted file.
"""

import logging
import os
from collections.abc import Mapping
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "output"
GAMMA_DECIMALS = 6
SCORE_DIGITS = 12


def worker_count(workers: int | None = None) -> int:
    """Worker processes, from the argument or ``NETBELL_WORKERS``."""
    if workers is None:
        raw = os.getenv("NETBELL_WORKERS", "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(
                f"NETBELL_WORKERS must be an integer, got {raw!r}"
            ) from None
    if workers < 1:
        raise ValueError(f"worker count must be at least 1, got {workers}")
    return workers


def default_output_dir() -> Path:
    """Output directory from ``NETBELL_OUTPUT_DIR``, ``output`` otherwise."""
    return Path(os.getenv("NETBELL_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))


def create_output_dir(output_dir: str | Path) -> Path:
    """Create output directory if it doesn't exist."""
    path = Path(output_dir)
    if not path.exists():
        path.mkdir(parents=True)
        logger.info("Created output directory: %s", path)
    return path


def format_gamma(gamma: float) -> str:
    """Noise parameter with six decimals."""
    return f"{gamma:.{GAMMA_DECIMALS}f}"


def format_score(score: float | None) -> str:
    """Score with twelve significant digits, blank when undefined."""
    if score is None or (isinstance(score, float) and np.isnan(score)):
        return ""
    return f"{float(score):.{SCORE_DIGITS}g}"


def flatten_config(config: Mapping, prefix: str = "") -> dict[str, object]:
    """Flatten nested mappings into dotted keys; lists become comma-joined text."""
    flat: dict[str, object] = {}
    for key, value in config.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten_config(value, f"{name}."))
        elif isinstance(value, list | tuple):
            flat[name] = ",".join(str(v) for v in value)
        else:
            flat[name] = value
    return flat
