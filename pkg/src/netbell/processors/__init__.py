"""Processing modules for netbell.

This package loads, merges and resolves YAML run configurations.
"""

from .config_processor import (
    DEFAULT_CONFIG,
    ConfigError,
    RunConfig,
    apply_overrides,
    dump_config,
    gamma_values,
    load_config_file,
    merge_config,
    resolve_config,
)

__all__ = [
    "DEFAULT_CONFIG",
    "ConfigError",
    "RunConfig",
    "load_config_file",
    "merge_config",
    "apply_overrides",
    "resolve_config",
    "dump_config",
    "gamma_values",
]
