"""Preparation and measurement ansatz library.

Every parameterized gate is built from single-qubit ``RY``/``RZ`` rotations
and fixed gates, so each parameter enters the circuit exactly once as a
Pauli rotation. The one exception is ``ARB_UNITARY`` on three or more
qubits, which is a Pauli-sum exponential and is not shift-differentiable.
"""

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import expm

from . import qmath
from .network import Network, SettingsLayout, SettingsVector

logger = logging.getLogger(__name__)


class GateKind(Enum):
    """Gate families available to preparation and measurement layers."""

    RY = "ry"
    RZ = "rz"
    ROT3 = "rot3"
    HADAMARD = "hadamard"
    CNOT = "cnot"
    PAULI_X = "pauli_x"
    ARB_STATE_PREP = "arb_state_prep"
    ARB_UNITARY = "arb_unitary"
    BELL_PHI_PLUS = "bell_phi_plus"
    BELL_PSI_PLUS = "bell_psi_plus"
    MAX_ENTANGLED = "max_entangled"
    NONMAX_ENTANGLED = "nonmax_entangled"
    LOCAL_RY = "local_ry"
    LOCAL_ROT = "local_rot"


_FIXED_ARITY = {
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.ROT3: 1,
    GateKind.HADAMARD: 1,
    GateKind.PAULI_X: 1,
    GateKind.CNOT: 2,
    GateKind.BELL_PHI_PLUS: 2,
    GateKind.BELL_PSI_PLUS: 2,
    GateKind.MAX_ENTANGLED: 2,
    GateKind.NONMAX_ENTANGLED: 2,
}


def param_count(kind: GateKind, num_qubits: int) -> int:
    """Number of real parameters of ``kind`` acting on ``num_qubits``."""
    m = num_qubits
    counts = {
        GateKind.RY: 1,
        GateKind.RZ: 1,
        GateKind.ROT3: 3,
        GateKind.MAX_ENTANGLED: 3,
        GateKind.NONMAX_ENTANGLED: 2,
        GateKind.ARB_STATE_PREP: 2 ** (m + 1) - 2,
        GateKind.ARB_UNITARY: 4**m - 1,
        GateKind.LOCAL_RY: m,
        GateKind.LOCAL_ROT: 3 * m,
    }
    return counts.get(kind, 0)


@dataclass(frozen=True)
class GateSpec:
    """A gate of a given kind on local qubit ``targets``."""

    kind: GateKind
    targets: tuple[int, ...]

    def __post_init__(self):
        """Check the target count for fixed-arity kinds."""
        arity = _FIXED_ARITY.get(self.kind)
        if arity is not None and len(self.targets) != arity:
            raise ValueError(
                f"{self.kind.value} acts on {arity} qubit(s), "
                f"got targets {self.targets}"
            )
        if not self.targets:
            raise ValueError(f"{self.kind.value} needs at least one target")

    @property
    def param_count(self) -> int:
        """Number of parameters this gate consumes."""
        return param_count(self.kind, len(self.targets))

    @property
    def shiftable(self) -> bool:
        """Whether every parameter is a single Pauli rotation."""
        return not (self.kind is GateKind.ARB_UNITARY and len(self.targets) >= 3)


def ry(theta: float) -> np.ndarray:
    """Rotation about the y axis."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    """Rotation about the z axis."""
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


def rot3(phi1: float, phi2: float, phi3: float) -> np.ndarray:
    """``RZ(phi1) RY(phi2) RZ(phi3)``."""
    return rz(phi1) @ ry(phi2) @ rz(phi3)


# Elementary circuit operations: ("ry"|"rz", param_index, qubit),
# or ("cnot", control, target).
_Op = tuple


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _uniformly_controlled(axis: str, offset: int, target: int) -> list[_Op]:
    """Rotation on ``target`` controlled by every qubit above it.

    Uses ``2**target`` plain rotations interleaved with CNOTs in Gray-code
    order; the angle applied for control value ``c`` is
    ``sum_i (-1)**popcount(c & gray(i)) * theta_i``.
    """
    k = target
    if k == 0:
        return [(axis, offset, target)]
    ops: list[_Op] = []
    size = 2**k
    for i in range(size):
        ops.append((axis, offset + i, target))
        changed = _gray(i) ^ _gray((i + 1) % size)
        bit = changed.bit_length() - 1
        ops.append(("cnot", k - 1 - bit, target))
    return ops


def _gray_sign_matrix(size: int) -> np.ndarray:
    signs = np.empty((size, size))
    for c in range(size):
        for i in range(size):
            signs[c, i] = (-1) ** bin(c & _gray(i)).count("1")
    return signs


def _state_prep_ops(num_qubits: int) -> list[_Op]:
    ops: list[_Op] = []
    offset = 0
    for k in range(num_qubits):
        ops += _uniformly_controlled("ry", offset, k)
        offset += 2**k
        ops += _uniformly_controlled("rz", offset, k)
        offset += 2**k
    return ops


def _rot3_ops(offset: int, qubit: int) -> list[_Op]:
    # matrix product RZ RY RZ, so the last factor acts first
    return [
        ("rz", offset + 2, qubit),
        ("ry", offset + 1, qubit),
        ("rz", offset, qubit),
    ]


def _two_qubit_unitary_ops() -> list[_Op]:
    return (
        _rot3_ops(0, 0)
        + _rot3_ops(3, 1)
        + [("cnot", 1, 0), ("rz", 6, 0), ("ry", 7, 1), ("cnot", 0, 1)]
        + [("ry", 8, 1), ("cnot", 1, 0)]
        + _rot3_ops(9, 0)
        + _rot3_ops(12, 1)
    )


def _ops_unitary(ops: Sequence[_Op], params: np.ndarray, num_qubits: int) -> np.ndarray:
    unitary = np.eye(2**num_qubits, dtype=complex)
    for op in ops:
        name = op[0]
        if name == "ry":
            gate, qubits = ry(params[op[1]]), [op[2]]
        elif name == "rz":
            gate, qubits = rz(params[op[1]]), [op[2]]
        else:
            gate, qubits = qmath.CNOT, [op[1], op[2]]
        unitary = qmath.embed_operator(gate, qubits, num_qubits) @ unitary
    return unitary


_PAULI_BASES: dict[int, list[np.ndarray]] = {}


def _pauli_basis(num_qubits: int) -> list[np.ndarray]:
    if num_qubits not in _PAULI_BASES:
        _PAULI_BASES[num_qubits] = [
            qmath.pauli_string("".join(labels))
            for labels in itertools.product("IXYZ", repeat=num_qubits)
            if set(labels) != {"I"}
        ]
    return _PAULI_BASES[num_qubits]


def arb_state_prep_unitary(num_qubits: int, params: Sequence[float]) -> np.ndarray:
    """Unitary whose first column is an arbitrary ``num_qubits`` pure state."""
    params = np.asarray(params, dtype=float)
    expected = param_count(GateKind.ARB_STATE_PREP, num_qubits)
    if params.shape != (expected,):
        raise ValueError(
            f"arbitrary state preparation on {num_qubits} qubit(s) takes "
            f"{expected} parameters, got {params.size}"
        )
    return _ops_unitary(_state_prep_ops(num_qubits), params, num_qubits)


def arb_unitary(num_qubits: int, params: Sequence[float]) -> np.ndarray:
    """Arbitrary ``num_qubits`` unitary up to global phase."""
    params = np.asarray(params, dtype=float)
    expected = param_count(GateKind.ARB_UNITARY, num_qubits)
    if params.shape != (expected,):
        raise ValueError(
            f"arbitrary unitary on {num_qubits} qubit(s) takes "
            f"{expected} parameters, got {params.size}"
        )
    if num_qubits == 1:
        return rot3(*params)
    if num_qubits == 2:
        return _ops_unitary(_two_qubit_unitary_ops(), params, 2)
    generator = sum(
        theta * pauli
        for theta, pauli in zip(params, _pauli_basis(num_qubits), strict=True)
    )
    return expm(-1j * generator)


def fit_state_prep_params(ket: Sequence[complex]) -> np.ndarray:
    """Parameters for which ``ARB_STATE_PREP`` prepares ``ket``.

    The result reproduces ``ket`` up to a global phase.
    """
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    num_qubits = qmath.num_qubits_of(ket.shape[0])
    ket = ket / np.linalg.norm(ket)
    phases = np.angle(ket)
    params: list[np.ndarray] = []
    for k in range(num_qubits):
        size = 2**k
        blocks = ket.reshape(size, 2, -1)
        norms = np.linalg.norm(blocks, axis=2)
        alpha = 2 * np.arctan2(norms[:, 1], norms[:, 0])
        child_phase = phases.reshape(2 * size, -1).mean(axis=1)
        beta = child_phase[1::2] - child_phase[0::2]
        signs = _gray_sign_matrix(size)
        params.append(signs.T @ alpha / size)
        params.append(signs.T @ beta / size)
    return np.concatenate(params)


def _local(gates: Sequence[np.ndarray]) -> np.ndarray:
    return qmath.kron_all(*gates)


def gate_unitary(gate: GateSpec, params: Sequence[float]) -> np.ndarray:
    """Unitary of ``gate`` on its own targets, first target most significant."""
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.shape[0] != gate.param_count:
        raise ValueError(
            f"{gate.kind.value} takes {gate.param_count} parameter(s), "
            f"got {params.shape[0]}"
        )
    m = len(gate.targets)
    kind = gate.kind
    if kind is GateKind.RY:
        return ry(params[0])
    if kind is GateKind.RZ:
        return rz(params[0])
    if kind is GateKind.ROT3:
        return rot3(*params)
    if kind is GateKind.HADAMARD:
        return qmath.HADAMARD
    if kind is GateKind.PAULI_X:
        return qmath.PAULI_X
    if kind is GateKind.CNOT:
        return qmath.CNOT
    if kind is GateKind.BELL_PHI_PLUS:
        return qmath.CNOT @ qmath.kron(qmath.HADAMARD, qmath.PAULI_I)
    if kind is GateKind.BELL_PSI_PLUS:
        return qmath.CNOT @ qmath.kron(qmath.HADAMARD, qmath.PAULI_X)
    if kind is GateKind.MAX_ENTANGLED:
        bell = qmath.CNOT @ qmath.kron(qmath.HADAMARD, qmath.PAULI_I)
        return qmath.kron(rot3(*params), qmath.PAULI_I) @ bell
    if kind is GateKind.NONMAX_ENTANGLED:
        local = rz(params[1]) @ ry(params[0])
        return qmath.CNOT @ qmath.kron(local, qmath.PAULI_I)
    if kind is GateKind.ARB_STATE_PREP:
        return arb_state_prep_unitary(m, params)
    if kind is GateKind.ARB_UNITARY:
        return arb_unitary(m, params)
    if kind is GateKind.LOCAL_RY:
        return _local([ry(t) for t in params])
    if kind is GateKind.LOCAL_ROT:
        return _local([rot3(*params[3 * i : 3 * i + 3]) for i in range(m)])
    raise ValueError(f"unsupported gate kind {kind}")


def layer_unitary(
    gates: Sequence[GateSpec], params: Sequence[float], num_qubits: int
) -> np.ndarray:
    """Compose gates in order (first gate acts first) on ``num_qubits``."""
    params = np.asarray(params, dtype=float).reshape(-1)
    expected = sum(g.param_count for g in gates)
    if params.shape[0] != expected:
        raise ValueError(f"layer takes {expected} parameters, got {params.shape[0]}")
    unitary = np.eye(2**num_qubits, dtype=complex)
    offset = 0
    for gate in gates:
        block = params[offset : offset + gate.param_count]
        offset += gate.param_count
        local = gate_unitary(gate, block)
        if list(gate.targets) != list(range(num_qubits)):
            local = qmath.embed_operator(local, gate.targets, num_qubits)
        unitary = local @ unitary
    return unitary


@dataclass(frozen=True, eq=False)
class PreparationSpec:
    """Preparation layer of one source."""

    name: str
    gates: tuple[GateSpec, ...] = ()
    num_qubits: int = 2
    fixed_state: np.ndarray | None = None

    @property
    def param_count(self) -> int:
        """Parameters consumed per source."""
        return sum(g.param_count for g in self.gates)

    @property
    def shiftable(self) -> bool:
        """Whether the parameter-shift rule applies."""
        return all(g.shiftable for g in self.gates)

    def unitary(self, params: Sequence[float]) -> np.ndarray:
        """Unitary applied to ``|0...0>``."""
        if self.fixed_state is not None:
            raise ValueError(f"{self.name} prepares a fixed mixed state")
        return layer_unitary(self.gates, params, self.num_qubits)

    def ket(self, params: Sequence[float]) -> np.ndarray:
        """Prepared pure state."""
        return self.unitary(params)[:, 0]

    def density(self, params: Sequence[float]) -> np.ndarray:
        """Prepared state as a density matrix."""
        if self.fixed_state is not None:
            return self.fixed_state
        ket = self.ket(params)
        return np.outer(ket, ket.conj())


@dataclass(frozen=True, eq=False)
class MeasurementSpec:
    """Measurement layer of one node, applied before Z-basis readout."""

    name: str
    num_qubits: int
    gates: tuple[GateSpec, ...] = ()

    @property
    def param_count(self) -> int:
        """Parameters consumed per input value."""
        return sum(g.param_count for g in self.gates)

    @property
    def shiftable(self) -> bool:
        """Whether the parameter-shift rule applies."""
        return all(g.shiftable for g in self.gates)

    def unitary(self, params: Sequence[float]) -> np.ndarray:
        """Unitary applied before readout."""
        return layer_unitary(self.gates, params, self.num_qubits)


def phi_plus_state_preparation() -> PreparationSpec:
    """``(|00> + |11>)/sqrt(2)``."""
    return PreparationSpec(
        "phi_plus_state_preparation", (GateSpec(GateKind.BELL_PHI_PLUS, (0, 1)),)
    )


def psi_plus_state_preparation() -> PreparationSpec:
    """``(|01> + |10>)/sqrt(2)``."""
    return PreparationSpec(
        "psi_plus_state_preparation", (GateSpec(GateKind.BELL_PSI_PLUS, (0, 1)),)
    )


def maximally_entangled_state_preparation() -> PreparationSpec:
    """Bell pair followed by an arbitrary rotation of the first qubit."""
    return PreparationSpec(
        "maximally_entangled_state_preparation",
        (GateSpec(GateKind.MAX_ENTANGLED, (0, 1)),),
    )


def nonmaximally_entangled_state_preparation() -> PreparationSpec:
    """``cos(a/2)|00> + exp(ib) sin(a/2)|11>``."""
    return PreparationSpec(
        "nonmaximally_entangled_state_preparation",
        (GateSpec(GateKind.NONMAX_ENTANGLED, (0, 1)),),
    )


def arbitrary_state_preparation() -> PreparationSpec:
    """Any two-qubit pure state."""
    return PreparationSpec(
        "arbitrary_state_preparation", (GateSpec(GateKind.ARB_STATE_PREP, (0, 1)),)
    )


def classical_state_preparation() -> PreparationSpec:
    """The product state ``|00>``."""
    return PreparationSpec("classical_state_preparation")


def fixed_state_preparation(rho: np.ndarray) -> PreparationSpec:
    """A fixed two-qubit density matrix with no parameters."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"fixed state must be 4x4, got {rho.shape}")
    qmath.check_density_matrix(rho)
    return PreparationSpec("fixed_state_preparation", fixed_state=rho)


def local_ry_measurement(num_qubits: int) -> MeasurementSpec:
    """One ``RY`` per qubit."""
    return MeasurementSpec(
        "local_ry_measurement",
        num_qubits,
        (GateSpec(GateKind.LOCAL_RY, tuple(range(num_qubits))),),
    )


def arbitrary_local_measurement(num_qubits: int) -> MeasurementSpec:
    """One arbitrary rotation per qubit."""
    return MeasurementSpec(
        "arbitrary_local_measurement",
        num_qubits,
        (GateSpec(GateKind.LOCAL_ROT, tuple(range(num_qubits))),),
    )


def arbitrary_projective_measurement(num_qubits: int) -> MeasurementSpec:
    """Arbitrary unitary on all of the node's qubits."""
    return MeasurementSpec(
        "arbitrary_projective_measurement",
        num_qubits,
        (GateSpec(GateKind.ARB_UNITARY, tuple(range(num_qubits))),),
    )


def computational_basis_measurement(num_qubits: int) -> MeasurementSpec:
    """Plain Z-basis readout with no parameters."""
    return MeasurementSpec("computational_basis_measurement", num_qubits)


PREPARATIONS = {
    "phi_plus_state_preparation": phi_plus_state_preparation,
    "psi_plus_state_preparation": psi_plus_state_preparation,
    "maximally_entangled_state_preparation": maximally_entangled_state_preparation,
    "nonmaximally_entangled_state_preparation": (
        nonmaximally_entangled_state_preparation
    ),
    "arbitrary_state_preparation": arbitrary_state_preparation,
    "classical_state_preparation": classical_state_preparation,
}

MEASUREMENTS = {
    "local_ry_measurement": local_ry_measurement,
    "arbitrary_local_measurement": arbitrary_local_measurement,
    "arbitrary_projective_measurement": arbitrary_projective_measurement,
    "computational_basis_measurement": computational_basis_measurement,
}


def get_preparation(name: str) -> PreparationSpec:
    """Look up a preparation ansatz by name."""
    try:
        return PREPARATIONS[name]()
    except KeyError as e:
        raise ValueError(
            f"unknown preparation {name!r}; available: {', '.join(PREPARATIONS)}"
        ) from e


def get_measurement(name: str, num_qubits: int) -> MeasurementSpec:
    """Look up a measurement ansatz by name for a node of ``num_qubits``."""
    try:
        return MEASUREMENTS[name](num_qubits)
    except KeyError as e:
        raise ValueError(
            f"unknown measurement {name!r}; available: {', '.join(MEASUREMENTS)}"
        ) from e


@dataclass(frozen=True, eq=False)
class NetworkAnsatz:
    """A network with one preparation per source and one measurement per node."""

    network: Network
    preparations: tuple[PreparationSpec, ...]
    measurements: tuple[MeasurementSpec, ...]
    layout: SettingsLayout = field(init=False)

    def __post_init__(self):
        """Check layer placement and derive the settings layout."""
        topology = self.network.topology
        if len(self.preparations) != len(topology.sources):
            raise ValueError(
                f"{len(topology.sources)} sources need as many preparations, "
                f"got {len(self.preparations)}"
            )
        if len(self.measurements) != len(topology.nodes):
            raise ValueError(
                f"{len(topology.nodes)} nodes need as many measurements, "
                f"got {len(self.measurements)}"
            )
        for prep, source in zip(self.preparations, topology.sources, strict=True):
            if prep.num_qubits != len(source.qubits):
                raise ValueError(f"{prep.name} does not fit source {source.name}")
        for meas, node in zip(self.measurements, topology.nodes, strict=True):
            if meas.num_qubits != len(node.qubits):
                raise ValueError(f"{meas.name} does not fit node {node.name}")
        layout = SettingsLayout(
            prep_counts=tuple(p.param_count for p in self.preparations),
            meas_counts=tuple(
                (m.param_count,) * node.input_arity
                for m, node in zip(self.measurements, topology.nodes, strict=True)
            ),
        )
        object.__setattr__(self, "layout", layout)

    @property
    def shiftable(self) -> bool:
        """Whether every layer supports the parameter-shift rule."""
        return all(p.shiftable for p in self.preparations) and all(
            m.shiftable for m in self.measurements
        )

    @property
    def has_fixed_states(self) -> bool:
        """Whether any source emits a fixed mixed state."""
        return any(p.fixed_state is not None for p in self.preparations)

    def settings(self, values: Sequence[float]) -> SettingsVector:
        """Wrap raw values in this ansatz's layout."""
        return SettingsVector(self.layout, np.asarray(values, dtype=float))

    def random_settings(self, rng: np.random.Generator) -> SettingsVector:
        """Settings drawn uniformly from ``[0, 2*pi)``."""
        return self.settings(rng.uniform(0.0, 2 * np.pi, self.layout.size))


def _expand(names: str | Sequence[str], count: int, label: str) -> list[str]:
    if isinstance(names, str):
        return [names] * count
    names = list(names)
    if len(names) != count:
        raise ValueError(f"expected {count} {label} names, got {len(names)}")
    return names


def build_ansatz(
    network: Network,
    preparation: str | Sequence[str] = "phi_plus_state_preparation",
    measurement: str | Sequence[str] = "local_ry_measurement",
) -> NetworkAnsatz:
    """Build an ansatz from Table-style names, one name or one per element."""
    topology = network.topology
    preps = [
        get_preparation(name)
        for name in _expand(preparation, len(topology.sources), "preparation")
    ]
    meas = [
        get_measurement(name, len(node.qubits))
        for name, node in zip(
            _expand(measurement, len(topology.nodes), "measurement"),
            topology.nodes,
            strict=True,
        )
    ]
    return NetworkAnsatz(network, tuple(preps), tuple(meas))


def hardware_ansatz(network: Network) -> NetworkAnsatz:
    """Bell pairs at every source and ``RY`` rotations before readout."""
    if network.kind not in ("star", "chain"):
        raise ValueError(f"no hardware ansatz for network kind {network.kind}")
    return build_ansatz(network, "phi_plus_state_preparation", "local_ry_measurement")


def _check_local_ry(ansatz: NetworkAnsatz) -> None:
    for meas in ansatz.measurements:
        if meas.name != "local_ry_measurement":
            raise ValueError("closed-form settings need local_ry_measurement layers")


def _ry_angle(direction: float) -> float:
    # RY(t) then Z readout measures cos(t) Z - sin(t) X
    return -direction


def partially_classical_settings(
    ansatz: NetworkAnsatz, classical_sources: Sequence[int] = ()
) -> SettingsVector:
    """Settings of the best known strategy with some sources classical.

    Quantum sources are measured in the noiseless optimal bases. Each
    exterior node attached to a classical ``|00>`` source measures Z for
    input 0 and X for input 1, and every central or interior qubit
    belonging to a classical source measures Z regardless of the input.
    With no classical sources this is the noiseless optimum.
    """
    _check_local_ry(ansatz)
    network = ansatz.network
    topology = network.topology
    classical = set(int(i) for i in classical_sources)
    layout = ansatz.layout
    values = np.zeros(layout.size)
    num_exterior = network.num_exterior

    for index, node in enumerate(topology.nodes):
        blocks = layout.meas_slices[index]
        if index < num_exterior:
            source = topology.source_of_qubit(node.qubits[0])
            if source in classical:
                directions = (0.0, np.pi / 2)
            else:
                directions = (np.pi / 4, -np.pi / 4)
            for value, block in enumerate(blocks):
                values[block] = _ry_angle(directions[value])
            continue
        for value, block in enumerate(blocks):
            angles = [
                0.0
                if topology.source_of_qubit(q) in classical
                else _ry_angle(value * np.pi / 2)
                for q in node.qubits
            ]
            values[block] = angles
    return ansatz.settings(values)


def optimal_settings(ansatz: NetworkAnsatz) -> SettingsVector:
    """Noiseless optimal settings for the hardware ansatz."""
    for prep in ansatz.preparations:
        if prep.name != "phi_plus_state_preparation":
            raise ValueError("optimal settings assume Bell-pair preparations")
    return partially_classical_settings(ansatz)
