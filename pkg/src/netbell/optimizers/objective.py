"""Bell-score objective binding a simulator to an inequality."""

from collections.abc import Sequence

import numpy as np

from ..scores.bell import BellInequality, BellScore
from ..simulators.ansatz import NetworkAnsatz
from ..simulators.behavior import NetworkSimulator
from ..simulators.channels import NoiseModel
from ..simulators.network import SettingsVector


class BellObjective:
    """Score and cost of an ansatz as a function of the flat settings vector."""

    def __init__(
        self,
        ansatz: NetworkAnsatz,
        inequality: BellInequality,
        noise: NoiseModel | None = None,
        simulation: str = "mixed",
        shots: int | None = None,
        seed: int | None = None,
    ):
        inequality.check_network(ansatz.network)
        self.ansatz = ansatz
        self.inequality = inequality
        self.simulator = NetworkSimulator(ansatz, noise, simulation, shots, seed)

    @property
    def num_params(self) -> int:
        """Length of the settings vector."""
        return self.ansatz.layout.size

    def settings(self, values: Sequence[float] | SettingsVector) -> SettingsVector:
        """Wrap raw values in the ansatz layout."""
        if isinstance(values, SettingsVector):
            return values
        return self.ansatz.settings(values)

    def correlators(self, values: Sequence[float] | SettingsVector) -> np.ndarray:
        """Correlators in input enumeration order."""
        return self.simulator.correlator_vector(self.settings(values))

    def score_from_correlators(self, correlators: np.ndarray) -> float:
        """Score of a flat correlator vector."""
        return self.inequality.score(correlators).value

    def score(self, values: Sequence[float] | SettingsVector) -> float:
        """Bell score at ``values``."""
        return self.score_from_correlators(self.correlators(values))

    def bell_score(self, values: Sequence[float] | SettingsVector) -> BellScore:
        """Bell score with bounds at ``values``."""
        return self.inequality.score(self.correlators(values))

    def cost(self, values: Sequence[float] | SettingsVector) -> float:
        """Negated score."""
        return -self.score(values)

    def random_settings(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform initial settings in ``[0, 2*pi)``."""
        return self.ansatz.random_settings(rng).values
