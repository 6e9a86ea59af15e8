"""Bell scores over correlator tables.

Correlator tables are arrays indexed by the network input slots, exterior
inputs first and the central (or shared interior) input ``y`` last.
"""

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..simulators.behavior import CorrelatorTable
from ..simulators.network import Network

GRADIENT_CLAMP = 1e-9


@dataclass(frozen=True)
class BellScore:
    """A score together with the bounds of its inequality."""

    value: float
    inequality: str
    classical_bound: float
    quantum_bound: float

    @property
    def violated(self) -> bool:
        """Whether the score exceeds the classical bound."""
        return self.value > self.classical_bound

    @property
    def cost(self) -> float:
        """Negated score, minimized by the optimizer."""
        return cost(self.value)


def cost(score: "BellScore | float") -> float:
    """Cost minimized by gradient descent."""
    value = score.value if isinstance(score, BellScore) else score
    return -float(value)


def _as_array(
    correlators: "CorrelatorTable | np.ndarray", shape: tuple[int, ...]
) -> np.ndarray:
    values = (
        correlators.values
        if isinstance(correlators, CorrelatorTable)
        else np.asarray(correlators, dtype=float)
    )
    if values.size != int(np.prod(shape)):
        raise ValueError(
            f"correlator table has {values.size} entries, "
            f"expected {int(np.prod(shape))}"
        )
    values = values.reshape(shape)
    if np.isnan(values).any():
        raise ValueError("correlator table has missing entries")
    return values


def _sign_pattern(n: int, y: int) -> np.ndarray:
    """``(-1)**(y * sum(x))`` over the exterior inputs."""
    grids = np.indices((2,) * n).sum(axis=0)
    return (-1.0) ** (y * grids)


def i_ny(correlators: "CorrelatorTable | np.ndarray", n: int, y: int) -> float:
    """``2**-n sum_x (-1)**(y sum x) <O_x1 ... O_xn O_y>``."""
    values = _as_array(correlators, (2,) * (n + 1))
    return float((_sign_pattern(n, y) * values[..., y]).sum() / 2**n)


def _root_derivative(value: float, n: int) -> float:
    # d|I|^(1/n)/dI, defined as 0 near the origin
    if abs(value) < GRADIENT_CLAMP:
        return 0.0
    return float(np.sign(value) * abs(value) ** (1.0 / n - 1.0) / n)


class BellInequality(ABC):
    """A Bell functional with its classical and quantum bounds."""

    id: str
    classical_bound: float
    quantum_bound: float

    @property
    @abstractmethod
    def shape(self) -> tuple[int, ...]:
        """Shape of the correlator table this inequality reads."""

    @property
    def unit_scale(self) -> float:
        """Factor from the normalized scale, where the quantum bound is sqrt(2)."""
        return 1.0

    @abstractmethod
    def value(self, correlators: np.ndarray) -> float:
        """Score of a correlator array."""

    @abstractmethod
    def gradient(self, correlators: np.ndarray) -> np.ndarray:
        """Derivative of the score with respect to each correlator."""

    def score(self, correlators: "CorrelatorTable | np.ndarray") -> BellScore:
        """Evaluate and wrap with bounds."""
        value = self.value(_as_array(correlators, self.shape))
        return BellScore(value, self.id, self.classical_bound, self.quantum_bound)

    def score_gradient(self, correlators: "CorrelatorTable | np.ndarray") -> np.ndarray:
        """Gradient in input enumeration order."""
        return self.gradient(_as_array(correlators, self.shape)).reshape(-1)

    def violated(self, score: "BellScore | float") -> bool:
        """Whether ``score`` exceeds the classical bound."""
        value = score.value if isinstance(score, BellScore) else float(score)
        return value > self.classical_bound

    def check_network(self, network: Network) -> None:
        """Raise unless ``network`` produces tables of the right shape."""
        if tuple(network.wiring.slot_arities) != self.shape:
            raise ValueError(
                f"inequality {self.id} reads inputs {self.shape}, "
                f"network {network.id} provides {network.wiring.slot_arities}"
            )


class CHSHInequality(BellInequality):
    """``|sum_xy (-1)**(xy) <A_x B_y>|``, halved when ``normalize`` is set."""

    def __init__(self, normalize: bool = False):
        self.normalize = normalize
        self.id = "chsh"
        self._scale = scale = 0.5 if normalize else 1.0
        self.classical_bound = 2.0 * scale
        self.quantum_bound = 2.0 * np.sqrt(2.0) * scale

    @property
    def shape(self) -> tuple[int, ...]:
        return (2, 2)

    @property
    def unit_scale(self) -> float:
        return 1.0 if self.normalize else 2.0

    _SIGNS = np.array([[1.0, 1.0], [1.0, -1.0]])

    def value(self, correlators: np.ndarray) -> float:
        total = float((self._SIGNS * correlators).sum())
        return abs(total) * self._scale

    def gradient(self, correlators: np.ndarray) -> np.ndarray:
        total = float((self._SIGNS * correlators).sum())
        if abs(total) < GRADIENT_CLAMP:
            return np.zeros_like(correlators)
        return np.sign(total) * self._SIGNS * self._scale


class StarInequality(BellInequality):
    """``|I_0|**(1/n) + |I_1|**(1/n)`` on the n-local star."""

    def __init__(self, n: int, inequality_id: str | None = None):
        if n < 1:
            raise ValueError(f"star inequality needs n >= 1, got {n}")
        self.n = n
        self.id = inequality_id or f"star:{n}"
        self.classical_bound = 1.0
        self.quantum_bound = float(np.sqrt(2.0))

    @property
    def shape(self) -> tuple[int, ...]:
        return (2,) * (self.n + 1)

    def value(self, correlators: np.ndarray) -> float:
        return sum(abs(i_ny(correlators, self.n, y)) ** (1.0 / self.n) for y in (0, 1))

    def gradient(self, correlators: np.ndarray) -> np.ndarray:
        grad = np.zeros(self.shape)
        for y in (0, 1):
            weight = _root_derivative(i_ny(correlators, self.n, y), self.n)
            grad[..., y] = weight * _sign_pattern(self.n, y) / 2**self.n
        return grad


class ChainInequality(StarInequality):
    """``sqrt|I_0| + sqrt|I_1|`` on the n-local chain.

    The interior nodes share ``y``, so the table has the shape of a
    bilocal table with the product of interior outputs as central output.
    """

    def __init__(self, n: int, inequality_id: str | None = None):
        if n < 2:
            raise ValueError(f"chain inequality needs n >= 2, got {n}")
        super().__init__(2, inequality_id or f"chain:{n}")
        self.chain_length = n


def chsh_score(
    correlators: "CorrelatorTable | np.ndarray", normalize: bool = False
) -> BellScore:
    """CHSH score of a two-party table."""
    return CHSHInequality(normalize).score(correlators)


def star_score(correlators: "CorrelatorTable | np.ndarray", n: int) -> BellScore:
    """n-local star score."""
    return StarInequality(n).score(correlators)


def chain_score(correlators: "CorrelatorTable | np.ndarray", n: int) -> BellScore:
    """n-local chain score."""
    return ChainInequality(n).score(correlators)


_INEQUALITY_ID = re.compile(r"^(star|chain):(\d+)$")
INEQUALITY_IDS = ("chsh", "bilocal", "star:n", "chain:n")


def get_inequality(inequality_id: str, normalize: bool = False) -> BellInequality:
    """Inequality for ``chsh``, ``bilocal``, ``star:n`` or ``chain:n``."""
    key = inequality_id.strip().lower()
    if key == "chsh":
        return CHSHInequality(normalize)
    if key == "bilocal":
        return StarInequality(2, "bilocal")
    match = _INEQUALITY_ID.match(key)
    if not match:
        raise ValueError(
            f"unknown inequality {inequality_id!r}; "
            f"available: {', '.join(INEQUALITY_IDS)}"
        )
    kind, n = match.group(1), int(match.group(2))
    return StarInequality(n) if kind == "star" else ChainInequality(n)
