"""Network execution: outcome probabilities, behaviors and correlators.

Node outcomes are parities of the node's qubit readouts, with bit 0 mapped
to ``+1`` and bit 1 to ``-1``. Outcome rows are indexed with the first node
as the most significant bit.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import qmath
from .ansatz import NetworkAnsatz
from .channels import ANCILLA_UNITARIES, NoiseLocation, NoiseModel
from .network import SettingsSlice, SettingsVector, slice_settings

logger = logging.getLogger(__name__)

BEHAVIOR_ATOL = 1e-9
SIMULATION_MODES = ("mixed", "ancilla")


@dataclass(frozen=True, eq=False)
class Behavior:
    """Column-stochastic matrix ``P(a|x)`` over node outcomes and inputs."""

    inputs: tuple[tuple[int, ...], ...]
    slot_arities: tuple[int, ...]
    node_names: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        """Check shape and stochasticity."""
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape[1] != len(self.inputs):
            raise ValueError(
                f"behavior has {matrix.shape[1]} columns for {len(self.inputs)} inputs"
            )
        if (matrix < -BEHAVIOR_ATOL).any() or (matrix > 1 + BEHAVIOR_ATOL).any():
            raise ValueError("behavior entries must lie in [0, 1]")
        if not np.allclose(matrix.sum(axis=0), 1.0, atol=BEHAVIOR_ATOL):
            raise ValueError("behavior columns must sum to 1")
        object.__setattr__(self, "matrix", matrix)

    @property
    def num_nodes(self) -> int:
        """Number of measurement nodes."""
        return len(self.node_names)

    def outputs(self) -> list[tuple[int, ...]]:
        """Outcome tuples in row order, each entry ``+1`` or ``-1``."""
        rows = self.matrix.shape[0]
        width = qmath.num_qubits_of(rows)
        return [
            tuple(1 - 2 * ((a >> (width - 1 - j)) & 1) for j in range(width))
            for a in range(rows)
        ]

    def column(self, inputs: Sequence[int]) -> np.ndarray:
        """Outcome distribution for one network input."""
        return self.matrix[:, self.inputs.index(tuple(inputs))]


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """Expected parity of all node outputs for every network input."""

    slot_arities: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        """Reshape to the input grid and check the range."""
        values = np.asarray(self.values, dtype=float).reshape(self.slot_arities)
        if (np.abs(values) > 1 + BEHAVIOR_ATOL).any():
            raise ValueError("correlators must lie in [-1, 1]")
        object.__setattr__(self, "values", values)

    def __getitem__(self, inputs: Sequence[int]) -> float:
        return float(self.values[tuple(inputs)])

    def flat(self) -> np.ndarray:
        """Values in input enumeration order."""
        return self.values.reshape(-1)


def parity_signs(num_nodes: int) -> np.ndarray:
    """``prod_j a_j`` for every outcome row."""
    rows = np.arange(2**num_nodes)
    popcount = np.array([bin(a).count("1") for a in rows])
    return 1.0 - 2.0 * (popcount % 2)


def correlators(behavior: Behavior) -> CorrelatorTable:
    """Correlator table of a dichotomic behavior."""
    rows = behavior.matrix.shape[0]
    if rows != 2**behavior.num_nodes:
        raise ValueError(
            f"correlators need dichotomic outputs: {rows} rows "
            f"for {behavior.num_nodes} nodes"
        )
    values = parity_signs(behavior.num_nodes) @ behavior.matrix
    return CorrelatorTable(behavior.slot_arities, values)


def node_marginal(behavior: Behavior, node: int) -> np.ndarray:
    """Distribution of one node's outcome, shape ``(2, num_inputs)``."""
    tensor = behavior.matrix.reshape([2] * behavior.num_nodes + [-1])
    others = tuple(j for j in range(behavior.num_nodes) if j != node)
    return tensor.sum(axis=others)


def sample_shots(
    probs: np.ndarray, shots: int, seed: int | np.random.Generator | None = None
) -> np.ndarray:
    """Empirical distribution of ``shots`` multinomial draws from ``probs``."""
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    counts = rng.multinomial(shots, probs / probs.sum())
    return counts / shots


def sample_behavior(
    behavior: Behavior, shots: int, seed: int | np.random.Generator | None = None
) -> Behavior:
    """Shot-sampled estimate of every column."""
    rng = np.random.default_rng(seed)
    matrix = np.column_stack(
        [sample_shots(column, shots, rng) for column in behavior.matrix.T]
    )
    return Behavior(behavior.inputs, behavior.slot_arities, behavior.node_names, matrix)


def _row_label(output: tuple[int, ...]) -> str:
    return "".join("+" if a > 0 else "-" for a in output)


def behavior_to_frame(behavior: Behavior) -> pd.DataFrame:
    """Behavior as a table with inputs as columns and outcomes as rows."""
    columns = ["x=" + "".join(str(x) for x in inputs) for inputs in behavior.inputs]
    index = pd.Index([_row_label(a) for a in behavior.outputs()], name="outputs")
    return pd.DataFrame(behavior.matrix, index=index, columns=columns)


def write_behavior_csv(behavior: Behavior, path: str | Path) -> Path:
    """Write the behavior table to ``path``."""
    path = Path(path)
    behavior_to_frame(behavior).to_csv(path, float_format="%.12g")
    return path


class NetworkSimulator:
    """Runs a network ansatz under a noise model.

    ``simulation="mixed"`` evolves the full density matrix with Kraus
    channels. ``simulation="ancilla"`` keeps a statevector and realizes each
    dephasing or amplitude-damping link channel with one ancilla qubit,
    appended after the network register. Setting ``shots`` replaces exact
    node distributions by multinomial estimates drawn from ``seed``.
    """

    def __init__(
        self,
        ansatz: NetworkAnsatz,
        noise: NoiseModel | None = None,
        simulation: str = "mixed",
        shots: int | None = None,
        seed: int | None = None,
    ):
        if simulation not in SIMULATION_MODES:
            raise ValueError(
                f"simulation must be one of {', '.join(SIMULATION_MODES)}, "
                f"got {simulation!r}"
            )
        if shots is not None and shots < 1:
            raise ValueError(f"shots must be at least 1, got {shots}")
        self.ansatz = ansatz
        self.noise = noise or NoiseModel.none()
        self.simulation = simulation
        self.shots = shots
        self.rng = np.random.default_rng(seed)

        network = ansatz.network
        self.topology = network.topology
        self.wiring = network.wiring
        self.inputs = tuple(self.wiring.inputs())
        self.num_nodes = len(self.topology.nodes)
        self.noise.check_topology(self.topology)
        self.detector_maps = self.noise.detector_maps(self.num_nodes)
        self._has_detector_noise = bool(self.noise.detector_channels)
        self._ancillas = self._plan_ancillas()
        self._output_index = self._parity_index()
        self._signs = parity_signs(self.num_nodes)

    def _plan_ancillas(self) -> list[tuple[np.ndarray, int]]:
        if self.simulation != "ancilla":
            return []
        if self.ansatz.has_fixed_states:
            raise ValueError("ancilla simulation needs pure-state preparations")
        plan = []
        for channel in self.noise.quantum_channels:
            if (
                channel.location is not NoiseLocation.LINK
                or channel.name not in ANCILLA_UNITARIES
            ):
                raise ValueError(
                    f"ancilla simulation supports dephasing and amplitude_damping "
                    f"link channels, got {channel.name}; use mixed simulation"
                )
            unitary = ANCILLA_UNITARIES[channel.name](channel.gamma)
            plan.append((unitary, channel.targets[0]))
        return plan

    def _parity_index(self) -> np.ndarray:
        n = self.topology.num_qubits
        z = np.arange(2**n)
        index = np.zeros_like(z)
        for node in self.topology.nodes:
            parity = np.zeros_like(z)
            for q in node.qubits:
                parity ^= (z >> (n - 1 - q)) & 1
            index = (index << 1) | parity
        return index

    @property
    def num_inputs(self) -> int:
        """Number of network inputs."""
        return len(self.inputs)

    def prep_blocks(self, settings: SettingsVector) -> list[np.ndarray]:
        """Per-source preparation parameters."""
        return [settings.values[block] for block in settings.layout.prep_slices]

    def prepare(self, prep_params: Sequence[np.ndarray]) -> np.ndarray:
        """Network state after preparation and quantum noise.

        A density matrix in mixed mode; a statevector over the register plus
        ancillas in ancilla mode.
        """
        sources = self.topology.sources
        groups = [source.qubits for source in sources]
        n = self.topology.num_qubits
        preparations = self.ansatz.preparations
        if self.simulation == "ancilla":
            kets = [
                prep.ket(params)
                for prep, params in zip(preparations, prep_params, strict=True)
            ]
            ket = qmath.tensor_ket(kets, groups, n)
            ket = np.kron(ket, qmath.basis_ket([0] * len(self._ancillas)))
            for k, (unitary, qubit) in enumerate(self._ancillas):
                ket = qmath.apply_unitary_ket(ket, unitary, [qubit, n + k])
            return ket

        states = [
            prep.density(params)
            for prep, params in zip(preparations, prep_params, strict=True)
        ]
        rho = qmath.tensor_operator(states, groups, n)
        for channel in self.noise.quantum_channels:
            rho = qmath.apply_kraus_unchecked(rho, channel.kraus, channel.targets, n)
        return rho

    def node_unitary(self, node: int, params: np.ndarray) -> np.ndarray:
        """Measurement-layer unitary of ``node`` for one input's parameters."""
        return self.ansatz.measurements[node].unitary(params)

    def measurement_table(self, settings: SettingsVector) -> list[list[np.ndarray]]:
        """Unitaries indexed by node and then by the node's input value."""
        values = settings.values
        return [
            [self.node_unitary(j, values[block]) for block in blocks]
            for j, blocks in enumerate(settings.layout.meas_slices)
        ]

    def measure(self, state: np.ndarray, unitaries: Sequence[np.ndarray]) -> np.ndarray:
        """Readout probabilities over the register after each node's unitary."""
        n = self.topology.num_qubits
        nodes = self.topology.nodes
        if self.simulation == "ancilla":
            ket = state
            for node, unitary in zip(nodes, unitaries, strict=True):
                ket = qmath.apply_unitary_ket(ket, unitary, list(node.qubits))
            probs = qmath.ket_probabilities(ket)
            return probs.reshape(2**n, -1).sum(axis=1)
        rho = state
        for node, unitary in zip(nodes, unitaries, strict=True):
            rho = qmath.conjugate(rho, unitary, list(node.qubits), n)
        return qmath.density_probabilities(rho)

    def node_distribution(self, probs: np.ndarray) -> np.ndarray:
        """Parity-reduced, detector-processed and optionally sampled outcomes."""
        size = 2**self.num_nodes
        dist = np.bincount(self._output_index, weights=probs, minlength=size)
        if self._has_detector_noise:
            tensor = dist.reshape([2] * self.num_nodes)
            for j, matrix in enumerate(self.detector_maps):
                tensor = np.tensordot(matrix, tensor, axes=([1], [j]))
                tensor = np.moveaxis(tensor, 0, j)
            dist = tensor.reshape(-1)
        dist = dist / dist.sum()
        if self.shots is not None:
            dist = sample_shots(dist, self.shots, self.rng)
        return dist

    def correlator(self, state: np.ndarray, unitaries: Sequence[np.ndarray]) -> float:
        """Correlator of one input given the prepared state."""
        dist = self.node_distribution(self.measure(state, unitaries))
        return float(self._signs @ dist)

    def input_unitaries(
        self, table: Sequence[Sequence[np.ndarray]], inputs: Sequence[int]
    ) -> list[np.ndarray]:
        """Pick each node's unitary for a network input."""
        node_inputs = self.wiring.node_inputs(inputs)
        return [table[j][value] for j, value in enumerate(node_inputs)]

    def simulate_probs(
        self, settings: SettingsVector, inputs: Sequence[int]
    ) -> np.ndarray:
        """Readout probabilities ``P(z|x)`` for one network input."""
        return simulate_probs(self, slice_settings(settings, self.wiring, inputs))

    def behavior(self, settings: SettingsVector) -> Behavior:
        """Full behavior over all network inputs."""
        state = self.prepare(self.prep_blocks(settings))
        table = self.measurement_table(settings)
        columns = [
            self.node_distribution(self.measure(state, self.input_unitaries(table, x)))
            for x in self.inputs
        ]
        return Behavior(
            self.inputs,
            self.wiring.slot_arities,
            tuple(node.name for node in self.topology.nodes),
            np.column_stack(columns),
        )

    def correlator_vector(self, settings: SettingsVector) -> np.ndarray:
        """Correlators in input enumeration order."""
        state = self.prepare(self.prep_blocks(settings))
        table = self.measurement_table(settings)
        return np.array(
            [
                self.correlator(state, self.input_unitaries(table, x))
                for x in self.inputs
            ]
        )

    def correlators(self, settings: SettingsVector) -> CorrelatorTable:
        """Correlator table at ``settings``."""
        values = self.correlator_vector(settings)
        return CorrelatorTable(self.wiring.slot_arities, values)


def simulate_probs(simulator: NetworkSimulator, settings: SettingsSlice) -> np.ndarray:
    """Readout distribution over all register bits for one settings slice."""
    state = simulator.prepare(settings.prep)
    unitaries = [
        simulator.node_unitary(j, params) for j, params in enumerate(settings.meas)
    ]
    probs = simulator.measure(state, unitaries)
    return probs / probs.sum()


def behavior_matrix(
    ansatz: NetworkAnsatz,
    settings: SettingsVector,
    noise: NoiseModel | None = None,
    simulation: str = "mixed",
    shots: int | None = None,
    seed: int | None = None,
) -> Behavior:
    """Behavior of ``ansatz`` at ``settings`` under ``noise``."""
    simulator = NetworkSimulator(ansatz, noise, simulation, shots, seed)
    return simulator.behavior(settings)
