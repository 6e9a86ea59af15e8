"""Run configuration: YAML loading, flag overrides, defaults and dumping.

A run configuration is a nested mapping::

    network: chain:3
    inequality: chain:3
    ansatz: {preparation: ..., measurement: ...}
    noise: {model: ..., placement: ..., gamma: ..., simulation: ...}
    optimizer: {step_size: ..., num_steps: ..., restarts: ..., ...}
    mode: {kind: exact}
    output: {directory: output, prefix: run}

``resolve_config`` fills every default so that dumping the result and
loading it back gives the same mapping.
"""

import copy
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from ..optimizers.descent import (
    DEFAULT_NUM_STEPS,
    DEFAULT_RESTARTS,
    OptimizerConfig,
    default_step_size,
)
from ..optimizers.scan import gamma_grid
from ..utils import default_output_dir

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: dict[str, Any] = {
    "network": "chsh",
    "inequality": None,
    "ansatz": {
        "preparation": "phi_plus_state_preparation",
        "measurement": "local_ry_measurement",
    },
    "noise": {
        "model": "none",
        "placement": "uniform",
        "gamma": 0.0,
        "simulation": "mixed",
    },
    "optimizer": {
        "step_size": None,
        "num_steps": DEFAULT_NUM_STEPS,
        "restarts": DEFAULT_RESTARTS,
        "gradient": "parameter_shift",
        "seed": 0,
        "warm_start": False,
    },
    "mode": {"kind": "exact", "shots": None, "seed": None},
    "output": {"directory": None, "prefix": "run"},
}


class ConfigError(ValueError):
    """A configuration file cannot be read as a run configuration."""


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a YAML run configuration."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as file:
            data = yaml.safe_load(file)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"error parsing YAML config file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping at top level")
    logger.debug("Loaded config from %s", path)
    return data


def merge_config(base: Mapping, overrides: Mapping) -> dict[str, Any]:
    """Deep-merge ``overrides`` into a copy of ``base``; overrides win."""
    merged = copy.deepcopy(dict(base))
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def set_dotted(config: dict[str, Any], key: str, value: Any) -> None:
    """Set ``noise.gamma``-style keys in a nested mapping."""
    *parents, leaf = key.split(".")
    node = config
    for parent in parents:
        child = node.get(parent)
        if not isinstance(child, dict):
            child = {}
            node[parent] = child
        node = child
    node[leaf] = value


def apply_overrides(config: Mapping, overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Apply dotted-key flag overrides; ``None`` values are skipped."""
    result = copy.deepcopy(dict(config))
    for key, value in overrides.items():
        if value is not None:
            set_dotted(result, key, value)
    return result


def _plain(value: Any) -> Any:
    # numpy scalars and tuples out, so safe_dump emits plain YAML
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def resolve_config(config: Mapping) -> dict[str, Any]:
    """Fill defaults: inequality from the network, step size per network."""
    resolved = merge_config(DEFAULT_CONFIG, config)
    network = str(resolved["network"]).strip().lower()
    resolved["network"] = network
    if resolved["inequality"] is None:
        resolved["inequality"] = network
    optimizer = resolved["optimizer"]
    if optimizer.get("step_size") is None:
        optimizer["step_size"] = default_step_size(network)
    if resolved["output"].get("directory") is None:
        resolved["output"]["directory"] = str(default_output_dir())
    gamma = resolved["noise"]["gamma"]
    if isinstance(gamma, tuple):
        resolved["noise"]["gamma"] = list(gamma)
    return _plain(resolved)


def dump_config(config: Mapping) -> str:
    """Resolved config as YAML text."""
    return yaml.safe_dump(_plain(dict(config)), sort_keys=False)


def gamma_values(grid: Any) -> list[float]:
    """Gamma grid of a ``noise.gamma`` entry: value, list or start/stop/step."""
    if isinstance(grid, Mapping):
        missing = {"start", "stop", "step"} - set(grid)
        if missing:
            raise ValueError(f"gamma grid needs {', '.join(sorted(missing))}")
        start, stop, step = (float(grid[k]) for k in ("start", "stop", "step"))
        grid = gamma_grid(start, stop, step)
        return [float(g) for g in grid]
    if isinstance(grid, list | tuple):
        return [float(g) for g in grid]
    return [float(grid)]


@dataclass(frozen=True)
class RunConfig:
    """A validated, fully resolved run configuration."""

    network: str
    inequality: str
    preparation: str | list[str]
    measurement: str | list[str]
    noise_model: str
    placement: str | list[int]
    gamma: Any
    simulation: str
    optimizer: OptimizerConfig
    mode: str
    shots: int | None
    shot_seed: int | None
    output_dir: Path
    prefix: str
    raw: dict[str, Any]

    @classmethod
    def from_mapping(cls, config: Mapping) -> "RunConfig":
        """Build from a resolved mapping."""
        ansatz, noise, opt = config["ansatz"], config["noise"], config["optimizer"]
        mode, output = config["mode"], config["output"]
        return cls(
            network=config["network"],
            inequality=config["inequality"],
            preparation=ansatz["preparation"],
            measurement=ansatz["measurement"],
            noise_model=noise["model"],
            placement=noise["placement"],
            gamma=noise["gamma"],
            simulation=noise["simulation"],
            optimizer=OptimizerConfig(
                step_size=float(opt["step_size"]),
                num_steps=int(opt["num_steps"]),
                restarts=int(opt["restarts"]),
                gradient=opt["gradient"],
                seed=int(opt["seed"]),
                warm_start=bool(opt["warm_start"]),
            ),
            mode=mode["kind"],
            shots=mode.get("shots") if mode["kind"] == "shots" else None,
            shot_seed=mode.get("seed"),
            output_dir=Path(output["directory"]),
            prefix=output["prefix"],
            raw=dict(config),
        )

    @property
    def gammas(self) -> list[float]:
        """The gamma grid of this run."""
        return gamma_values(self.gamma)

    @property
    def file_stem(self) -> str:
        """Output stem naming the network and ansatz."""
        prep = (
            self.preparation.removesuffix("_state_preparation")
            if isinstance(self.preparation, str)
            else "mixed"
        )
        meas = (
            self.measurement.removesuffix("_measurement")
            if isinstance(self.measurement, str)
            else "mixed"
        )
        tag = f"{self.network}_{prep}_{meas}".replace(":", "-")
        return f"{self.prefix}_{tag}"
