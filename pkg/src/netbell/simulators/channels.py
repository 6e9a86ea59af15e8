"""Noise channels on sources, links and detectors.

Source and link noise are Kraus channels applied to the network state after
preparation. Detector noise is a column-stochastic map applied to a node's
``(+1, -1)`` outcome distribution.
"""

import contextlib
import logging
from collections.abc import Callable, Iterator, Mapping, Sequence
from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import qmath
from .network import Topology

logger = logging.getLogger(__name__)

STOCHASTIC_ATOL = 1e-10

# Visibility conversions: gamma = factor * (1 - v)
DEPOLARIZING_FACTORS = {"qubit": 3 / 4, "source": 15 / 16}


class NoiseLocation(Enum):
    """Where in the network a channel acts."""

    LINK = "link"
    SOURCE = "source"
    DETECTOR = "detector"


def check_gamma(gamma: float, name: str = "gamma") -> float:
    """Return ``gamma`` as a float, raising unless it lies in [0, 1]."""
    value = float(gamma)
    if not 0.0 <= value <= 1.0 or np.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {gamma}")
    return value


def check_stochastic(matrix: np.ndarray, atol: float = STOCHASTIC_ATOL) -> None:
    """Raise ``ValueError`` unless ``matrix`` is column-stochastic."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"post-processing map must be square, got {matrix.shape}")
    if (matrix < -atol).any():
        raise ValueError("post-processing map has negative entries")
    if not np.allclose(matrix.sum(axis=0), 1.0, atol=atol):
        raise ValueError("post-processing map columns do not sum to 1")


def is_unital(kraus: Sequence[np.ndarray], atol: float = qmath.SELF_CHECK_ATOL) -> bool:
    """Whether the channel maps the identity to itself."""
    dim = np.asarray(kraus[0]).shape[0]
    image = sum(np.asarray(k) @ np.asarray(k).conj().T for k in kraus)
    return bool(np.allclose(image, np.eye(dim), atol=atol))


def apply_channel(rho: np.ndarray, kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Apply a Kraus channel acting on the whole of ``rho``."""
    return sum(k @ rho @ k.conj().T for k in kraus)


def choi_matrix(channel: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) channel(|i><j|)``."""
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            choi += np.kron(unit, channel(unit))
    return choi


def kraus_from_choi(
    choi: np.ndarray, dim: int, atol: float = 1e-12
) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a Choi matrix."""
    eigenvalues, vectors = np.linalg.eigh((choi + choi.conj().T) / 2)
    kraus = []
    for value, vector in zip(eigenvalues, vectors.T, strict=True):
        if value > atol:
            kraus.append(np.sqrt(value) * vector.reshape(dim, dim).T)
    return kraus


def depolarizing_qubit(gamma: float) -> list[np.ndarray]:
    """Single-qubit depolarizing channel in Pauli form."""
    gamma = check_gamma(gamma)
    return [np.sqrt(1 - gamma) * qmath.PAULI_I] + [
        np.sqrt(gamma / 3) * p for p in qmath.PAULIS[1:]
    ]


def depolarizing_source(gamma: float) -> list[np.ndarray]:
    """Two-qubit depolarizing channel acting on a whole source."""
    gamma = check_gamma(gamma)
    kraus = [np.sqrt(1 - gamma) * np.eye(4, dtype=complex)]
    for i, j in np.ndindex(4, 4):
        if (i, j) != (0, 0):
            pauli = np.kron(qmath.PAULIS[i], qmath.PAULIS[j])
            kraus.append(np.sqrt(gamma / 15) * pauli)
    return kraus


def depolarizing(gamma: float, num_qubits: int = 1) -> list[np.ndarray]:
    """``X -> (1 - gamma) X + gamma Tr(X) I / 2**M`` on ``num_qubits``."""
    gamma = check_gamma(gamma)
    dim = 2**num_qubits
    strings = [
        qmath.kron_all(*(qmath.PAULIS[i] for i in index))
        for index in np.ndindex(*([4] * num_qubits))
    ]
    weight_identity = 1 - gamma + gamma / dim**2
    return [np.sqrt(weight_identity) * strings[0]] + [
        np.sqrt(gamma) / dim * s for s in strings[1:]
    ]


def pauli_channel(p_x: float, p_y: float, p_z: float) -> list[np.ndarray]:
    """Qubit Pauli mixture with the remaining weight on the identity."""
    probabilities = [
        check_gamma(p, name) for p, name in ((p_x, "p_x"), (p_y, "p_y"), (p_z, "p_z"))
    ]
    p_i = 1.0 - sum(probabilities)
    if p_i < -qmath.SELF_CHECK_ATOL:
        raise ValueError(f"Pauli probabilities sum to {sum(probabilities)} > 1")
    weights = [max(p_i, 0.0)] + probabilities
    return [np.sqrt(w) * p for w, p in zip(weights, qmath.PAULIS, strict=True)]


def dephasing(gamma: float) -> list[np.ndarray]:
    """Phase damping: coherences shrink by ``sqrt(1 - gamma)``."""
    gamma = check_gamma(gamma)
    return [
        np.diag([1.0, np.sqrt(1 - gamma)]).astype(complex),
        np.diag([0.0, np.sqrt(gamma)]).astype(complex),
    ]


def amplitude_damping(gamma: float) -> list[np.ndarray]:
    """Energy relaxation from ``|1>`` to ``|0>`` with probability ``gamma``."""
    gamma = check_gamma(gamma)
    return [
        np.diag([1.0, np.sqrt(1 - gamma)]).astype(complex),
        np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex),
    ]


def partial_replacer(gamma: float, replacer_state: np.ndarray) -> list[np.ndarray]:
    """``rho -> (1 - gamma) rho + gamma Tr(rho) sigma``."""
    gamma = check_gamma(gamma)
    sigma = np.asarray(replacer_state, dtype=complex)
    qmath.check_density_matrix(sigma)
    dim = sigma.shape[0]
    eigenvalues, vectors = np.linalg.eigh(sigma)
    kraus = [np.sqrt(1 - gamma) * np.eye(dim, dtype=complex)]
    for value, vector in zip(eigenvalues, vectors.T, strict=True):
        if value > qmath.SELF_CHECK_ATOL:
            for j in range(dim):
                kraus.append(np.sqrt(gamma * value) * np.outer(vector, np.eye(dim)[j]))
    return kraus


_PSI_SUBSPACE = (
    np.outer(qmath.PSI_PLUS, qmath.PSI_PLUS.conj())
    + np.outer(qmath.PSI_MINUS, qmath.PSI_MINUS.conj())
)


def colored_noise_map(rho: np.ndarray, gamma: float) -> np.ndarray:
    """``(1 - gamma) rho + (gamma / 2) Tr(rho) (|Psi+><Psi+| + |Psi-><Psi-|)``."""
    return (1 - gamma) * rho + 0.5 * gamma * np.trace(rho) * _PSI_SUBSPACE


def _listed_colored_kraus(gamma: float) -> list[np.ndarray]:
    def ketbra(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.outer(a, b.conj())

    half = np.sqrt(gamma / 2)
    return [
        np.sqrt(1 - gamma) * np.eye(4, dtype=complex),
        half * ketbra(qmath.PSI_PLUS, qmath.PHI_PLUS),
        half * ketbra(qmath.PSI_MINUS, qmath.PHI_MINUS),
        half * ketbra(qmath.PSI_PLUS, qmath.PSI_PLUS),
        half * ketbra(qmath.PSI_PLUS, qmath.PSI_MINUS),
    ]


def _reproduces_colored_map(kraus: Sequence[np.ndarray], gamma: float) -> bool:
    for i, j in np.ndindex(4, 4):
        unit = np.zeros((4, 4), dtype=complex)
        unit[i, j] = 1.0
        if not np.allclose(
            apply_channel(unit, kraus),
            colored_noise_map(unit, gamma),
            atol=qmath.VALIDATION_ATOL,
        ):
            return False
    return True


def colored_noise(gamma: float) -> list[np.ndarray]:
    """Two-qubit colored noise pushing a source towards the Psi subspace.

    The operator list with ``|Psi+>`` outputs is tried first. When it is
    incomplete or disagrees with the affine map, Kraus operators are taken
    from the Choi matrix of the affine map instead.
    """
    gamma = check_gamma(gamma)
    listed = _listed_colored_kraus(gamma)
    try:
        qmath.check_kraus_completeness(listed)
        if _reproduces_colored_map(listed, gamma):
            return listed
        reason = "it does not reproduce the affine map"
    except ValueError as e:
        reason = str(e)
    logger.debug(
        "colored noise gamma=%s: listed Kraus set rejected (%s)", gamma, reason
    )
    kraus = kraus_from_choi(
        choi_matrix(lambda rho: colored_noise_map(rho, gamma), 4), 4
    )
    qmath.check_kraus_completeness(kraus)
    return kraus


def white_noise_detector(gamma: float) -> np.ndarray:
    """Detector that outputs a uniformly random bit with probability ``gamma``."""
    gamma = check_gamma(gamma)
    return (1 - gamma) * np.eye(2) + 0.5 * gamma * np.ones((2, 2))


def biased_detector(gamma: float) -> np.ndarray:
    """Detector that outputs ``+1`` with probability ``gamma``."""
    gamma = check_gamma(gamma)
    return (1 - gamma) * np.eye(2) + gamma * np.array([[1.0, 1.0], [0.0, 0.0]])


def visibility_from_gamma(gamma: float, kind: str = "source") -> float:
    """Visibility ``v`` of a depolarizing channel (``kind`` qubit or source)."""
    factor = _depolarizing_factor(kind)
    return 1.0 - check_gamma(gamma) / factor


def gamma_from_visibility(visibility: float, kind: str = "source") -> float:
    """Noise parameter reproducing ``visibility``."""
    factor = _depolarizing_factor(kind)
    gamma = factor * (1.0 - float(visibility))
    return check_gamma(gamma)


def _depolarizing_factor(kind: str) -> float:
    try:
        return DEPOLARIZING_FACTORS[kind]
    except KeyError as e:
        raise ValueError(
            f"visibility kind must be qubit or source, got {kind!r}"
        ) from e


def _controlled_ry(gamma: float) -> np.ndarray:
    theta = 2 * np.arcsin(np.sqrt(gamma))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    gate = np.eye(4, dtype=complex)
    gate[2:, 2:] = [[c, -s], [s, c]]
    return gate


def dephasing_ancilla_unitary(gamma: float) -> np.ndarray:
    """System (most significant) and ancilla unitary realizing dephasing."""
    return _controlled_ry(check_gamma(gamma))


def amplitude_damping_ancilla_unitary(gamma: float) -> np.ndarray:
    """Controlled-RY followed by a CNOT from ancilla back to system."""
    cnot_from_ancilla = qmath.embed_operator(qmath.CNOT, [1, 0], 2)
    return cnot_from_ancilla @ _controlled_ry(check_gamma(gamma))


ANCILLA_UNITARIES = {
    "dephasing": dephasing_ancilla_unitary,
    "amplitude_damping": amplitude_damping_ancilla_unitary,
}


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    """A channel placed on a source, a link qubit, or a detector.

    ``targets`` holds register qubits for source and link channels and a
    node index for detector channels.
    """

    name: str
    location: NoiseLocation
    gamma: float
    targets: tuple[int, ...]
    kraus: tuple[np.ndarray, ...] = ()
    matrix: np.ndarray | None = None

    def __post_init__(self):
        """Validate the realization against the placement."""
        if self.location is NoiseLocation.DETECTOR:
            if self.matrix is None or self.kraus:
                raise ValueError(f"{self.name}: detector noise needs a matrix only")
            check_stochastic(self.matrix)
            if len(self.targets) != 1:
                raise ValueError(f"{self.name}: detector noise targets one node")
            return
        if self.matrix is not None or not self.kraus:
            raise ValueError(f"{self.name}: quantum noise needs Kraus operators only")
        dim = 2 ** len(self.targets)
        for op in self.kraus:
            if op.shape != (dim, dim):
                raise ValueError(
                    f"{self.name}: Kraus shape {op.shape} does not match "
                    f"{len(self.targets)} target qubit(s)"
                )
        qmath.check_kraus_completeness(self.kraus)

    @property
    def is_detector(self) -> bool:
        """Whether this is classical post-processing."""
        return self.location is NoiseLocation.DETECTOR


@dataclass(frozen=True)
class ChannelFactory:
    """How to build a named channel and where it sits."""

    location: NoiseLocation
    build: Callable[[float], list[np.ndarray] | np.ndarray]


CHANNEL_FACTORIES: dict[str, ChannelFactory] = {
    "depolarizing_qubit": ChannelFactory(NoiseLocation.LINK, depolarizing_qubit),
    "depolarizing_source": ChannelFactory(NoiseLocation.SOURCE, depolarizing_source),
    "dephasing": ChannelFactory(NoiseLocation.LINK, dephasing),
    "amplitude_damping": ChannelFactory(NoiseLocation.LINK, amplitude_damping),
    "colored": ChannelFactory(NoiseLocation.SOURCE, colored_noise),
    "white_noise_detector": ChannelFactory(
        NoiseLocation.DETECTOR, white_noise_detector
    ),
    "biased_detector": ChannelFactory(NoiseLocation.DETECTOR, biased_detector),
}

Placement = str | Sequence[int]
Factories = Mapping[str, ChannelFactory]

# per-context replacements installed by fault_injection
_FACTORY_OVERRIDES: ContextVar[Factories | None] = ContextVar(
    "channel_factory_overrides", default=None
)


def channel_factories() -> Factories:
    """The registry with the current context's fault overrides applied."""
    overrides = _FACTORY_OVERRIDES.get()
    return {**CHANNEL_FACTORIES, **overrides} if overrides else CHANNEL_FACTORIES


def make_channel(
    name: str,
    gamma: float,
    targets: Sequence[int],
    factories: Factories | None = None,
) -> NoiseChannel:
    """Build a registered channel on ``targets``.

    ``factories`` defaults to :func:`channel_factories`.
    """
    registry = channel_factories() if factories is None else factories
    try:
        factory = registry[name]
    except KeyError as e:
        raise ValueError(
            f"unknown noise model {name!r}; available: {', '.join(registry)}"
        ) from e
    gamma = check_gamma(gamma)
    realization = factory.build(gamma)
    if factory.location is NoiseLocation.DETECTOR:
        return NoiseChannel(
            name, factory.location, gamma, tuple(targets), matrix=realization
        )
    return NoiseChannel(
        name,
        factory.location,
        gamma,
        tuple(targets),
        kraus=tuple(np.asarray(k, dtype=complex) for k in realization),
    )


def placement_elements(
    location: NoiseLocation, topology: Topology
) -> list[tuple[int, ...]]:
    """Target tuples of every element a channel at ``location`` can occupy."""
    if location is NoiseLocation.LINK:
        return [link.qubits for link in topology.links]
    if location is NoiseLocation.SOURCE:
        return [source.qubits for source in topology.sources]
    return [(index,) for index in range(len(topology.nodes))]


def resolve_placement(placement: Placement, num_elements: int) -> list[int]:
    """Element indices selected by ``single``, ``uniform`` or an explicit list."""
    if isinstance(placement, str):
        if placement == "single":
            return [0]
        if placement == "uniform":
            return list(range(num_elements))
        raise ValueError(
            f"placement must be single, uniform or a list of indices, got {placement!r}"
        )
    indices = [int(i) for i in placement]
    if not indices:
        raise ValueError("explicit placement lists at least one element")
    if len(set(indices)) != len(indices):
        raise ValueError(f"placement repeats an element: {indices}")
    for index in indices:
        if not 0 <= index < num_elements:
            raise ValueError(
                f"placement index {index} outside 0..{num_elements - 1}"
            )
    return indices


@dataclass(frozen=True)
class NoiseModel:
    """Ordered channels applied between preparation and measurement."""

    channels: tuple[NoiseChannel, ...] = ()

    @classmethod
    def none(cls) -> "NoiseModel":
        """The noiseless model."""
        return cls()

    @classmethod
    def from_placement(
        cls,
        name: str,
        gamma: float | Sequence[float],
        placement: Placement,
        topology: Topology,
        factories: Factories | None = None,
    ) -> "NoiseModel":
        """Place channel ``name`` on the elements selected by ``placement``.

        ``gamma`` is one value for every selected element or a vector with
        one value per selected element. ``factories`` replaces the channel
        registry, by default :func:`channel_factories`.
        """
        if name in ("none", None):
            return cls()
        registry = channel_factories() if factories is None else factories
        if name not in registry:
            raise ValueError(
                f"unknown noise model {name!r}; "
                f"available: none, {', '.join(registry)}"
            )
        location = registry[name].location
        elements = placement_elements(location, topology)
        selected = resolve_placement(placement, len(elements))
        if np.ndim(gamma) == 0:
            gammas = [float(gamma)] * len(selected)
        else:
            gammas = [float(g) for g in gamma]
            if len(gammas) != len(selected):
                raise ValueError(
                    f"gamma vector has {len(gammas)} entries for "
                    f"{len(selected)} placed channels"
                )
        return cls(
            tuple(
                make_channel(name, g, elements[index], registry)
                for g, index in zip(gammas, selected, strict=True)
            )
        )

    @property
    def quantum_channels(self) -> tuple[NoiseChannel, ...]:
        """Source and link channels in declared order."""
        return tuple(c for c in self.channels if not c.is_detector)

    @property
    def detector_channels(self) -> tuple[NoiseChannel, ...]:
        """Detector post-processing channels."""
        return tuple(c for c in self.channels if c.is_detector)

    def check_topology(self, topology: Topology) -> None:
        """Raise if a channel targets something outside ``topology``."""
        for channel in self.channels:
            limit = len(topology.nodes) if channel.is_detector else topology.num_qubits
            for target in channel.targets:
                if not 0 <= target < limit:
                    raise ValueError(
                        f"{channel.name} targets {target}, outside 0..{limit - 1}"
                    )

    def detector_maps(self, num_nodes: int) -> list[np.ndarray]:
        """Composite post-processing map per node, identity where noiseless."""
        maps = [np.eye(2) for _ in range(num_nodes)]
        for channel in self.detector_channels:
            node = channel.targets[0]
            maps[node] = channel.matrix @ maps[node]
        return maps


@contextlib.contextmanager
def fault_injection(name: str, scale: float = 0.5) -> Iterator[None]:
    """Temporarily build channel ``name`` with ``gamma * scale``.

    Only channels constructed inside the block, in the current thread or
    task context, are affected. ``CHANNEL_FACTORIES`` itself is untouched.
    """
    if name not in CHANNEL_FACTORIES:
        raise ValueError(f"cannot inject a fault into unknown channel {name!r}")
    original = CHANNEL_FACTORIES[name]
    faulty = ChannelFactory(
        original.location, lambda gamma: original.build(gamma * scale)
    )
    overrides = {**(_FACTORY_OVERRIDES.get() or {}), name: faulty}
    token = _FACTORY_OVERRIDES.set(overrides)
    logger.warning("fault injected into %s (gamma scaled by %s)", name, scale)
    try:
        yield
    finally:
        _FACTORY_OVERRIDES.reset(token)
