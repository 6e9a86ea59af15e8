"""n-local network topologies, input wiring and the settings-vector layout."""

import itertools
import re
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Source:
    """An independent source distributing a state on ``qubits``."""

    name: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class Node:
    """A measurement node holding ``qubits`` and reading one input slot."""

    name: str
    qubits: tuple[int, ...]
    input_arity: int = 2


@dataclass(frozen=True)
class Link:
    """A single transmitted qubit; qubit channels act on links."""

    name: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class Topology:
    """Sources, nodes and links over an ordered qubit register."""

    num_qubits: int
    sources: tuple[Source, ...]
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]

    def __post_init__(self):
        """Validate that sources and nodes each partition the register."""
        register = list(range(self.num_qubits))
        for label, members in (("source", self.sources), ("node", self.nodes)):
            qubits = [q for member in members for q in member.qubits]
            if len(set(qubits)) != len(qubits):
                raise ValueError(f"{label} qubit sets overlap: {qubits}")
            if sorted(qubits) != register:
                raise ValueError(
                    f"{label} qubits {sorted(qubits)} do not cover "
                    f"the register of {self.num_qubits} qubits"
                )

    @classmethod
    def from_groups(
        cls,
        source_qubits: Sequence[Sequence[int]],
        node_qubits: Sequence[Sequence[int]],
        node_names: Sequence[str],
    ) -> "Topology":
        """Build a topology with one link per qubit."""
        num_qubits = sum(len(q) for q in source_qubits)
        return cls(
            num_qubits=num_qubits,
            sources=tuple(
                Source(f"L{i + 1}", tuple(q)) for i, q in enumerate(source_qubits)
            ),
            nodes=tuple(
                Node(name, tuple(q))
                for name, q in zip(node_names, node_qubits, strict=True)
            ),
            links=tuple(Link(f"q{q + 1}", (q,)) for q in range(num_qubits)),
        )

    def source_of_qubit(self, qubit: int) -> int:
        """Index of the source emitting ``qubit``."""
        for index, source in enumerate(self.sources):
            if qubit in source.qubits:
                return index
        raise ValueError(f"qubit {qubit} is not emitted by any source")


@dataclass(frozen=True)
class InputWiring:
    """Maps a network input vector to each node's input.

    ``slot_arities`` lists the arity of every network input slot, and
    ``node_slots[j]`` names the slot read by node ``j``.
    """

    slot_arities: tuple[int, ...]
    node_slots: tuple[int, ...]

    def __post_init__(self):
        """Check every node reads an existing slot."""
        for slot in self.node_slots:
            if not 0 <= slot < len(self.slot_arities):
                raise ValueError(f"node wired to missing input slot {slot}")

    def inputs(self) -> list[tuple[int, ...]]:
        """All network inputs, lexicographic with the last slot fastest."""
        return list(itertools.product(*(range(a) for a in self.slot_arities)))

    def check_input(self, inputs: Sequence[int]) -> tuple[int, ...]:
        """Validate a network input vector against the slot arities."""
        inputs = tuple(int(x) for x in inputs)
        if len(inputs) != len(self.slot_arities):
            raise ValueError(
                f"expected {len(self.slot_arities)} inputs, got {len(inputs)}"
            )
        for value, arity in zip(inputs, self.slot_arities, strict=True):
            if not 0 <= value < arity:
                raise ValueError(f"input value {value} outside range 0..{arity - 1}")
        return inputs

    def node_inputs(self, inputs: Sequence[int]) -> tuple[int, ...]:
        """Per-node input values for a network input vector."""
        inputs = self.check_input(inputs)
        return tuple(inputs[slot] for slot in self.node_slots)


@dataclass(frozen=True)
class Network:
    """A named topology with its input wiring."""

    id: str
    kind: str
    n: int
    topology: Topology
    wiring: InputWiring

    @property
    def num_exterior(self) -> int:
        """Number of exterior (single-qubit, own-input) nodes."""
        return self.n if self.kind == "star" else 2


def build_star(n: int) -> Network:
    """Star network with ``n`` two-qubit sources around a central node.

    Exterior nodes come first in node order and the central node last.
    For ``n == 2`` the register follows the bilocal layout, which makes the
    result identical to ``build_chain(2)``.
    """
    if n < 1:
        raise ValueError(f"star network needs n >= 1, got {n}")
    if n == 2:
        network = build_chain(2)
        return Network("star:2", "star", 2, network.topology, network.wiring)

    sources = [(i, n + i) for i in range(n)]
    nodes = [(j,) for j in range(n)] + [tuple(range(n, 2 * n))]
    names = [f"A{j + 1}" for j in range(n)] + ["B1"]
    topology = Topology.from_groups(sources, nodes, names)
    wiring = InputWiring(
        slot_arities=(2,) * (n + 1), node_slots=tuple(range(n)) + (n,)
    )
    return Network(f"star:{n}", "star", n, topology, wiring)


def build_chain(n: int) -> Network:
    """Chain of ``n`` sources; interior nodes share the input bit ``y``."""
    if n < 2:
        raise ValueError(f"chain network needs n >= 2, got {n}")
    sources = [(2 * i, 2 * i + 1) for i in range(n)]
    nodes = [(0,), (2 * n - 1,)] + [(2 * j - 1, 2 * j) for j in range(1, n)]
    names = ["A1", "A2"] + [f"B{j}" for j in range(1, n)]
    topology = Topology.from_groups(sources, nodes, names)
    wiring = InputWiring(
        slot_arities=(2, 2, 2), node_slots=(0, 1) + (2,) * (n - 1)
    )
    return Network(f"chain:{n}", "chain", n, topology, wiring)


_NETWORK_ID = re.compile(r"^(star|chain):(\d+)$")


def build_network(network_id: str) -> Network:
    """Build a network from ``chsh``, ``bilocal``, ``star:n`` or ``chain:n``."""
    key = network_id.strip().lower()
    if key == "chsh":
        return build_star(1)
    if key == "bilocal":
        return build_star(2)
    match = _NETWORK_ID.match(key)
    if not match:
        raise ValueError(
            f"unknown network id {network_id!r}; "
            "expected chsh, bilocal, star:n or chain:n"
        )
    kind, n = match.group(1), int(match.group(2))
    return build_star(n) if kind == "star" else build_chain(n)


@dataclass(frozen=True)
class SettingsLayout:
    """Flat index ranges of the settings vector.

    Preparation blocks come first (one per source), followed by measurement
    blocks ordered by node and then by the node's input value.
    """

    prep_counts: tuple[int, ...]
    meas_counts: tuple[tuple[int, ...], ...]
    prep_slices: tuple[slice, ...] = field(
        init=False, repr=False, compare=False
    )
    meas_slices: tuple[tuple[slice, ...], ...] = field(
        init=False, repr=False, compare=False
    )
    size: int = field(init=False, compare=False)

    def __post_init__(self):
        """Assign contiguous index ranges."""
        offset = 0
        prep_slices = []
        for count in self.prep_counts:
            prep_slices.append(slice(offset, offset + count))
            offset += count
        meas_slices = []
        for per_input in self.meas_counts:
            node_slices = []
            for count in per_input:
                node_slices.append(slice(offset, offset + count))
                offset += count
            meas_slices.append(tuple(node_slices))
        object.__setattr__(self, "prep_slices", tuple(prep_slices))
        object.__setattr__(self, "meas_slices", tuple(meas_slices))
        object.__setattr__(self, "size", offset)

    @property
    def num_prep_params(self) -> int:
        """Total preparation parameters."""
        return sum(self.prep_counts)

    def owner(self, index: int) -> tuple[str, int, int | None]:
        """Describe a flat index as ``("prep", source, None)`` or a meas block."""
        for source, block in enumerate(self.prep_slices):
            if block.start <= index < block.stop:
                return ("prep", source, None)
        for node, blocks in enumerate(self.meas_slices):
            for value, block in enumerate(blocks):
                if block.start <= index < block.stop:
                    return ("meas", node, value)
        raise IndexError(f"index {index} outside settings of size {self.size}")


@dataclass(frozen=True, eq=False)
class SettingsVector:
    """Parameter values paired with their layout."""

    layout: SettingsLayout
    values: np.ndarray

    def __post_init__(self):
        """Coerce values to a float array and check the length."""
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.shape[0] != self.layout.size:
            raise ValueError(
                f"settings length {values.shape[0]} does not match "
                f"layout size {self.layout.size}"
            )
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class SettingsSlice:
    """Parameters relevant to one network input."""

    inputs: tuple[int, ...]
    prep: tuple[np.ndarray, ...]
    meas: tuple[np.ndarray, ...]


def slice_settings(
    settings: SettingsVector, wiring: InputWiring, inputs: Sequence[int]
) -> SettingsSlice:
    """Select preparation parameters and each node's block for ``inputs``."""
    layout = settings.layout
    node_inputs = wiring.node_inputs(inputs)
    if len(node_inputs) != len(layout.meas_slices):
        raise ValueError("layout and wiring disagree on the number of nodes")
    values = settings.values
    prep = tuple(values[block] for block in layout.prep_slices)
    meas = tuple(
        values[blocks[value]]
        for blocks, value in zip(layout.meas_slices, node_inputs, strict=True)
    )
    return SettingsSlice(tuple(int(x) for x in inputs), prep, meas)
