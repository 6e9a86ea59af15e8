"""Closed-form maxima used as ground truth for the optimizer.

Curve values are on the normalized scale, where the quantum bound of every
network (CHSH included) is ``sqrt(2)``.
"""

import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..simulators import qmath
from ..simulators.ansatz import ry, rz
from ..simulators.channels import NoiseModel, check_gamma
from ..simulators.network import build_network

logger = logging.getLogger(__name__)

CURVE_MODELS = (
    "depolarizing_source",
    "depolarizing_qubit",
    "dephasing",
    "colored",
    "white_noise_detector",
)
CURVE_PLACEMENTS = ("single", "uniform")
BREAKING_ATOL = 1e-12

_PAULI_PAIRS = np.array(
    [[np.kron(a, b) for b in qmath.PAULIS[1:]] for a in qmath.PAULIS[1:]]
)


class UnsupportedCurveError(ValueError):
    """No closed form is known for the requested combination."""


def correlation_matrix_T(rho: np.ndarray) -> np.ndarray:
    """``t_ij = Tr[rho sigma_i (x) sigma_j]`` for ``i, j`` in x, y, z."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"correlation matrix needs a two-qubit state, got {rho.shape}")
    return np.real(np.einsum("ab,ijba->ij", rho, _PAULI_PAIRS))


def correlation_eigenvalues(rho: np.ndarray) -> tuple[float, float, float]:
    """Eigenvalues of ``T^T T`` in descending order."""
    t = correlation_matrix_T(rho)
    return qmath.eig3_sym_desc(t.T @ t)


def horodecki_max_chsh(rho: np.ndarray) -> float:
    """Maximal CHSH value ``2 sqrt(mu_1 + mu_2)`` over projective measurements."""
    mu1, mu2, _ = correlation_eigenvalues(rho)
    return float(2.0 * np.sqrt(max(mu1 + mu2, 0.0)))


def _check_count(states: Sequence[np.ndarray], n: int) -> None:
    if len(states) != n:
        raise ValueError(f"expected {n} source states, got {len(states)}")


def max_star_score(states: Sequence[np.ndarray], n: int) -> float:
    """Maximal star score of the given sources with the product-measurement bound."""
    _check_count(states, n)
    mus = np.array([correlation_eigenvalues(rho)[:2] for rho in states])
    products = np.prod(mus, axis=0)
    return float(np.sqrt(np.sum(np.abs(products) ** (1.0 / n))))


def max_chain_score(states: Sequence[np.ndarray], n: int) -> float:
    """Maximal chain score of the given sources with the product-measurement bound."""
    _check_count(states, n)
    mus = np.array([correlation_eigenvalues(rho)[:2] for rho in states])
    products = np.prod(mus, axis=0)
    return float(np.sqrt(np.sum(np.sqrt(np.abs(products)))))


def classical_source_star_score(n: int, k: int) -> float:
    """Star score with ``k`` of ``n`` sources replaced by ``|00>``."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")
    return float(np.sqrt(2.0) ** ((n - k) / n))


def amplitude_damping_breaking(gamma1: float, gamma2: float) -> bool:
    """Whether two-sided amplitude damping rules out CHSH violation with Bell pairs."""
    g1 = check_gamma(gamma1, "gamma1")
    g2 = check_gamma(gamma2, "gamma2")
    return bool((1 - g1) * (1 - g2) <= 0.5 + BREAKING_ATOL)


# -- noise-robustness curves -------------------------------------------------

_CURVE_NETWORK = re.compile(r"^(star|chain)(?::(\d+))?$")


def _curve_network(network: str, n: int | None) -> tuple[str, int | None]:
    key = network.strip().lower()
    if key == "chsh":
        return "star", 1
    if key == "bilocal":
        return "star", 2
    match = _CURVE_NETWORK.match(key)
    if not match:
        raise ValueError(f"unknown network {network!r} for a curve")
    kind = match.group(1)
    if match.group(2) is not None:
        explicit = int(match.group(2))
        if n is not None and n != explicit:
            raise ValueError(f"network {network} conflicts with n={n}")
        n = explicit
    return kind, n


def _preparation_key(preparation: str) -> str:
    return preparation.removesuffix("_state_preparation")


def _element_gammas(
    gamma: float | Sequence[float], placement: str, count: int
) -> list[float]:
    if placement not in CURVE_PLACEMENTS:
        raise UnsupportedCurveError(
            f"no closed form for placement {placement!r}; "
            f"supported: {', '.join(CURVE_PLACEMENTS)}"
        )
    if np.ndim(gamma) == 0:
        value = check_gamma(gamma)
        return [value] + [value if placement == "uniform" else 0.0] * (count - 1)
    if placement != "uniform":
        raise UnsupportedCurveError("a gamma vector needs uniform placement")
    values = [check_gamma(g) for g in gamma]
    if len(values) != count:
        raise ValueError(f"gamma vector needs {count} entries, got {len(values)}")
    return values


def _source_mu(
    model: str, gammas: Sequence[float], preparation: str
) -> tuple[float, float]:
    """Top two eigenvalues of ``T^T T`` for one noisy Bell-pair source."""
    if model == "depolarizing_source":
        v = 1 - 16 * gammas[0] / 15
        return v * v, v * v
    if model == "depolarizing_qubit":
        v = (1 - 4 * gammas[0] / 3) * (1 - 4 * gammas[1] / 3)
        return v * v, v * v
    if model == "dephasing":
        return 1.0, (1 - gammas[0]) * (1 - gammas[1])
    # colored
    g = gammas[0]
    third = (1 - 2 * g) ** 2 if preparation == "phi_plus" else 1.0
    mus = sorted([(1 - g) ** 2, (1 - g) ** 2, third], reverse=True)
    return mus[0], mus[1]


def _combine(kind: str, mus: Sequence[tuple[float, float]]) -> float:
    n = len(mus)
    chsh = [np.sqrt(m1 + m2) for m1, m2 in mus]
    if kind == "star":
        return float(np.prod(chsh) ** (1.0 / n))
    # interior sources enter through sqrt(mu1): their relay nodes measure one
    # fixed correlation axis, so noiseless ones contribute 1 and Werner chains
    # reduce to sqrt(2) v**(n/2)
    interior = np.prod([np.sqrt(m1) for m1, _ in mus[1:-1]]) if n > 2 else 1.0
    return float(np.sqrt(chsh[0] * chsh[-1] * interior))


def curve(
    model: str,
    network: str,
    placement: str,
    gamma: float | Sequence[float],
    n: int | None = None,
    preparation: str = "phi_plus_state_preparation",
) -> float:
    """Analytic maximal score under a noise model, normalized scale.

    Supported models are source and qubit depolarizing, dephasing, colored
    noise (Bell-pair sources prepared as ``phi_plus`` or ``psi_plus``) and
    detector white noise, each with ``single`` or ``uniform`` placement.
    Sources are Bell pairs and nodes measure product observables.
    Anything else raises :class:`UnsupportedCurveError`.
    """
    if model not in CURVE_MODELS:
        raise UnsupportedCurveError(
            f"no closed form for noise model {model!r}; "
            f"supported: {', '.join(CURVE_MODELS)}"
        )
    kind, n = _curve_network(network, n)
    prep = _preparation_key(preparation)
    if prep not in ("phi_plus", "psi_plus"):
        raise UnsupportedCurveError(f"no closed form for preparation {preparation!r}")
    if model == "colored" and n is None:
        raise ValueError("colored-noise curves need n")

    if model == "white_noise_detector":
        if n is None:
            raise ValueError("detector curves need n")
        gammas = _element_gammas(gamma, placement, n + 1)
        survival = float(np.prod([1 - g for g in gammas]))
        exponent = 1.0 / n if kind == "star" else 0.5
        return float(np.sqrt(2.0) * survival**exponent)

    if model == "dephasing" and placement == "uniform" and np.ndim(gamma) == 0:
        # independent of n: every source carries the same coherence factor
        g = check_gamma(gamma)
        return float(np.sqrt(1 + (1 - g) ** 2))
    if n is None:
        raise ValueError(f"{model} curves with {placement} placement need n")

    topology = build_network(f"{kind}:{n}").topology
    if model in ("depolarizing_source", "colored"):
        per_source = [[g] for g in _element_gammas(gamma, placement, n)]
    else:
        qubit_gammas = _element_gammas(gamma, placement, topology.num_qubits)
        per_source = [
            [qubit_gammas[q] for q in source.qubits] for source in topology.sources
        ]
    mus = [_source_mu(model, gammas, prep) for gammas in per_source]
    return _combine(kind, mus)


def bell_state_prediction(
    model: str,
    network: str,
    placement: str | Sequence[int],
    gamma: float | Sequence[float],
    n: int | None = None,
) -> float:
    """Maximal-violation formula evaluated on channel-noisy ``|Phi+>`` sources.

    This is the naive prediction that ignores strategies with classical
    or partially classical sources.
    """
    kind, n = _curve_network(network, n)
    if n is None:
        raise ValueError("bell-state predictions need n")
    topology = build_network(f"{kind}:{n}").topology
    noise = NoiseModel.from_placement(model, gamma, placement, topology)
    if noise.detector_channels:
        raise UnsupportedCurveError(
            "bell-state predictions cover source and link noise"
        )
    states = []
    for source in topology.sources:
        rho = qmath.ket_to_density(qmath.PHI_PLUS)
        for channel in noise.quantum_channels:
            if set(channel.targets) <= set(source.qubits):
                local = [source.qubits.index(q) for q in channel.targets]
                rho = qmath.apply_kraus(rho, channel.kraus, local)
        states.append(rho)
    if kind == "star":
        return max_star_score(states, n)
    return max_chain_score(states, n)


# -- maximally entangled grid search -----------------------------------------


@dataclass(frozen=True)
class GridSearchResult:
    """Best CHSH value over ``(U (x) I)|Phi+>`` and the angles reaching it."""

    score: float
    angles: tuple[float, float, float]


def _maxent_kets(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    # (U (x) I)|Phi+> has amplitudes U[i, j] / sqrt(2) at index (i, j)
    half_sum, half_diff = (a + c) / 2, (a - c) / 2
    cos, sin = np.cos(b / 2), np.sin(b / 2)
    u = np.stack(
        [
            np.exp(-1j * half_sum) * cos,
            -np.exp(-1j * half_diff) * sin,
            np.exp(1j * half_diff) * sin,
            np.exp(1j * half_sum) * cos,
        ],
        axis=-1,
    )
    return u / np.sqrt(2)


def _batched_chsh(
    kets: np.ndarray, channel_a: Sequence[np.ndarray], channel_b: Sequence[np.ndarray]
) -> np.ndarray:
    rho = np.einsum("gi,gj->gij", kets, kets.conj())
    noisy = np.zeros_like(rho)
    for ka in channel_a:
        for kb in channel_b:
            k = np.kron(ka, kb)
            noisy += np.einsum("ij,gjk,lk->gil", k, rho, k.conj())
    t = np.real(np.einsum("gab,ijba->gij", noisy, _PAULI_PAIRS))
    r = np.einsum("gki,gkj->gij", t, t)
    mu = np.linalg.eigvalsh(r)
    return 2.0 * np.sqrt(np.clip(mu[:, -1] + mu[:, -2], 0.0, None))


def maxent_gridsearch_oracle(
    channel_a: Sequence[np.ndarray] | None = None,
    channel_b: Sequence[np.ndarray] | None = None,
    resolution: int = 24,
    refinements: int = 2,
    shrink: float = 4.0,
) -> GridSearchResult:
    """Best CHSH value of maximally entangled sources under two qubit channels.

    Searches ``U = RZ(a) RY(b) RZ(c)`` on the first qubit of ``|Phi+>`` on a
    ``resolution**3`` grid, then refines around the best point with grids
    shrunk by ``shrink``. The value is a lower bound on the true maximum.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    channel_a = channel_a or [qmath.PAULI_I]
    channel_b = channel_b or [qmath.PAULI_I]
    for channel in (channel_a, channel_b):
        qmath.check_kraus_completeness(channel)

    axes = [
        np.linspace(0, 2 * np.pi, resolution, endpoint=False),
        np.linspace(0, np.pi, resolution),
        np.linspace(0, 2 * np.pi, resolution, endpoint=False),
    ]
    half_widths = np.array([np.pi, np.pi / 2, np.pi])
    best_score, best_angles = -np.inf, (0.0, 0.0, 0.0)
    for level in range(refinements + 1):
        if level > 0:
            half_widths = half_widths / shrink
            axes = [
                np.linspace(center - h, center + h, resolution)
                for center, h in zip(best_angles, half_widths, strict=True)
            ]
        a, b, c = (g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij"))
        scores = _batched_chsh(_maxent_kets(a, b, c), channel_a, channel_b)
        index = int(np.argmax(scores))
        if scores[index] > best_score:
            best_score = float(scores[index])
            best_angles = (float(a[index]), float(b[index]), float(c[index]))
        logger.debug("grid level %d: best CHSH %.12g", level, best_score)
    return GridSearchResult(best_score, best_angles)


def maxent_state(angles: Sequence[float]) -> np.ndarray:
    """Density matrix of ``(RZ(a) RY(b) RZ(c) (x) I)|Phi+>``."""
    a, b, c = angles
    local = rz(a) @ ry(b) @ rz(c)
    ket = np.kron(local, qmath.PAULI_I) @ qmath.PHI_PLUS
    return qmath.ket_to_density(ket)
