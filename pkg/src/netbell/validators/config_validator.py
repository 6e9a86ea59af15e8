"""Run configuration validator.

Reports every invalid field of a resolved run configuration at once, each
error naming its field path (``noise.gamma``, ``optimizer.step_size``, ...).
"""

from collections.abc import Mapping
from numbers import Integral, Real
from typing import Any

from ..optimizers.gradients import GRADIENT_METHODS
from ..processors.config_processor import DEFAULT_CONFIG, gamma_values
from ..scores.bell import get_inequality
from ..simulators.ansatz import MEASUREMENTS, PREPARATIONS, build_ansatz
from ..simulators.behavior import SIMULATION_MODES
from ..simulators.channels import CHANNEL_FACTORIES, NoiseModel
from ..simulators.network import Network, build_network
from .base_validator import BaseValidator, ValidationLevel, ValidationResult

MODES = ("exact", "shots")


def _is_int(value: Any) -> bool:
    return isinstance(value, Integral) and not isinstance(value, bool)


def _is_real(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


class RunConfigValidator(BaseValidator):
    """Validator for resolved run configurations."""

    def __init__(self, config: Mapping[str, Any]):
        """Initialize with a resolved configuration mapping."""
        super().__init__()
        self.config = config

    def _error(self, field: str, message: str, suggestion: str | None = None):
        self._report(
            ValidationLevel.ERROR,
            message,
            field=field,
            suggestion=suggestion,
            code="invalid_field",
        )

    def _section(self, name: str) -> Mapping[str, Any]:
        section = self.config.get(name)
        if not isinstance(section, Mapping):
            self._error(name, f"{name} must be a mapping")
            return {}
        return section

    def validate(self) -> ValidationResult:
        """Check every field and collect the issues."""
        self.errors = []
        for key in self.config:
            if key not in DEFAULT_CONFIG:
                self._report(
                    ValidationLevel.WARNING,
                    f"unknown key {key!r} is ignored",
                    field=key,
                )

        network = self._validate_network()
        self._validate_ansatz(network)
        self._validate_noise(network)
        self._validate_optimizer()
        self._validate_mode()
        self._validate_output()

        return self._result(fields_checked=len(DEFAULT_CONFIG))

    def _validate_network(self) -> Network | None:
        network = None
        try:
            network = build_network(str(self.config.get("network")))
        except ValueError as e:
            self._error("network", str(e))
        inequality = self.config.get("inequality")
        try:
            ineq = get_inequality(str(inequality))
            if network is not None:
                ineq.check_network(network)
        except ValueError as e:
            self._error("inequality", str(e))
        return network

    def _validate_ansatz(self, network: Network | None) -> None:
        ansatz = self._section("ansatz")
        known = True
        for key, registry in (
            ("preparation", PREPARATIONS),
            ("measurement", MEASUREMENTS),
        ):
            names = ansatz.get(key)
            listed = [names] if isinstance(names, str) else names
            if not isinstance(listed, list) or not listed:
                self._error(f"ansatz.{key}", f"{key} must be a name or a list of names")
                known = False
                continue
            unknown = [name for name in listed if name not in registry]
            if unknown:
                self._error(
                    f"ansatz.{key}",
                    f"unknown {key} {', '.join(map(repr, unknown))}",
                    suggestion=f"available: {', '.join(registry)}",
                )
                known = False
        if network is None or not known:
            return
        try:
            build_ansatz(network, ansatz["preparation"], ansatz["measurement"])
        except (ValueError, KeyError) as e:
            self._error("ansatz", str(e))

    def _validate_noise(self, network: Network | None) -> None:
        noise = self._section("noise")
        if not noise:
            return
        model = noise.get("model")
        if model != "none" and model not in CHANNEL_FACTORIES:
            self._error(
                "noise.model",
                f"unknown noise model {model!r}",
                suggestion=f"available: none, {', '.join(CHANNEL_FACTORIES)}",
            )
            model = None

        gammas: list[float] = []
        grid = noise.get("gamma")
        try:
            gammas = gamma_values(grid)
        except (TypeError, ValueError) as e:
            self._error("noise.gamma", str(e))
        else:
            if not gammas:
                self._error("noise.gamma", "gamma grid is empty")
            for g in gammas:
                if not 0.0 <= g <= 1.0:
                    self._error("noise.gamma", f"gamma must lie in [0, 1], got {g}")
                    break
            if any(b <= a for a, b in zip(gammas, gammas[1:], strict=False)):
                self._error("noise.gamma", "gamma grid must be strictly increasing")

        if noise.get("simulation") not in SIMULATION_MODES:
            self._error(
                "noise.simulation",
                f"simulation must be one of {', '.join(SIMULATION_MODES)}, "
                f"got {noise.get('simulation')!r}",
            )

        if model and model != "none" and network is not None:
            try:
                NoiseModel.from_placement(
                    model, 0.0, noise.get("placement"), network.topology
                )
            except (TypeError, ValueError) as e:
                self._error("noise.placement", str(e))

    def _validate_optimizer(self) -> None:
        opt = self._section("optimizer")
        if not opt:
            return
        step = opt.get("step_size")
        if not _is_real(step) or not step > 0:
            self._error(
                "optimizer.step_size", f"step_size must be positive, got {step!r}"
            )
        for key in ("num_steps", "restarts"):
            value = opt.get(key)
            if not _is_int(value) or value < 1:
                self._error(
                    f"optimizer.{key}", f"{key} must be an integer >= 1, got {value!r}"
                )
        if opt.get("gradient") not in GRADIENT_METHODS:
            self._error(
                "optimizer.gradient",
                f"gradient must be one of {', '.join(GRADIENT_METHODS)}, "
                f"got {opt.get('gradient')!r}",
            )
        seed = opt.get("seed")
        if not _is_int(seed) or seed < 0:
            self._error(
                "optimizer.seed", f"seed must be a non-negative integer, got {seed!r}"
            )
        if not isinstance(opt.get("warm_start"), bool):
            self._error("optimizer.warm_start", "warm_start must be true or false")

    def _validate_mode(self) -> None:
        mode = self._section("mode")
        if not mode:
            return
        kind = mode.get("kind")
        if kind not in MODES:
            self._error("mode.kind", f"mode must be exact or shots, got {kind!r}")
            return
        if kind == "shots":
            shots = mode.get("shots")
            if not _is_int(shots) or shots < 1:
                self._error(
                    "mode.shots", f"shots must be a positive integer, got {shots!r}"
                )
        seed = mode.get("seed")
        if seed is not None and (not _is_int(seed) or seed < 0):
            self._error(
                "mode.seed", f"seed must be a non-negative integer, got {seed!r}"
            )

    def _validate_output(self) -> None:
        output = self._section("output")
        if not output:
            return
        if not isinstance(output.get("directory"), str) or not output["directory"]:
            self._error("output.directory", "output directory must be a path")
        if not isinstance(output.get("prefix"), str) or not output["prefix"]:
            self._error("output.prefix", "output prefix must be a non-empty string")
