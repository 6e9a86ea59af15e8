"""Dense linear algebra and quantum-state primitives.

Conventions used throughout netbell:

- Qubit 0 is the most significant bit of a computational-basis index.
- Density matrices and operators are plain ``numpy`` arrays of shape
  ``(2**N, 2**N)``; kets are arrays of length ``2**N``.
- Operators acting on a subset of qubits are given as a ``targets`` list; the
  first target is the most significant qubit of the operator.
"""

from collections.abc import Sequence
from functools import reduce

import numpy as np

VALIDATION_ATOL = 1e-8
SELF_CHECK_ATOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# control is the first (most significant) qubit
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def num_qubits_of(dim: int) -> int:
    """Return N for a dimension 2**N, raising ``ValueError`` otherwise."""
    num_qubits = int(dim).bit_length() - 1
    if dim < 1 or 2**num_qubits != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return num_qubits


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the indices of ``a`` most significant."""
    return np.kron(a, b)


def kron_all(*operators: np.ndarray) -> np.ndarray:
    """Kronecker product of several operators, left to right."""
    if not operators:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, operators)


def is_hermitian(matrix: np.ndarray, atol: float = VALIDATION_ATOL) -> bool:
    """Check ``matrix == matrix^dagger`` within ``atol``."""
    matrix = np.asarray(matrix)
    return matrix.shape[0] == matrix.shape[1] and np.allclose(
        matrix, matrix.conj().T, atol=atol
    )


def is_unitary(matrix: np.ndarray, atol: float = VALIDATION_ATOL) -> bool:
    """Check ``U^dagger U == I`` within ``atol``."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return np.allclose(
        matrix.conj().T @ matrix, np.eye(matrix.shape[0]), atol=atol
    )


def is_density_matrix(rho: np.ndarray, atol: float = SELF_CHECK_ATOL) -> bool:
    """Check unit trace, Hermiticity and positivity within ``atol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if not is_hermitian(rho, atol=atol):
        return False
    if abs(np.trace(rho) - 1.0) > atol:
        return False
    eigenvalues = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return bool(eigenvalues.min() >= -atol)


def check_density_matrix(rho: np.ndarray, atol: float = VALIDATION_ATOL) -> None:
    """Raise ``ValueError`` when ``rho`` is not a valid density matrix."""
    if not is_density_matrix(rho, atol=atol):
        raise ValueError("matrix is not a valid density matrix")


def ket_to_density(ket: np.ndarray) -> np.ndarray:
    """Return ``|psi><psi|`` for a normalized ket."""
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    if abs(np.vdot(ket, ket) - 1.0) > VALIDATION_ATOL:
        raise ValueError("ket is not normalized")
    return np.outer(ket, ket.conj())


def basis_ket(bits: Sequence[int]) -> np.ndarray:
    """Computational-basis ket for a bit string, qubit 0 first."""
    index = 0
    for bit in bits:
        index = (index << 1) | int(bit)
    ket = np.zeros(2 ** len(bits), dtype=complex)
    ket[index] = 1.0
    return ket


def pauli_string(labels: str) -> np.ndarray:
    """Operator for a Pauli label string such as ``"XZ"`` or ``"IY"``."""
    lookup = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
    try:
        return kron_all(*(lookup[label] for label in labels.upper()))
    except KeyError as e:
        raise ValueError(f"unknown Pauli label in {labels!r}") from e


def _check_targets(targets: Sequence[int], num_qubits: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct, got {targets}")
    for target in targets:
        if not 0 <= target < num_qubits:
            raise ValueError(
                f"target qubit {target} out of range for {num_qubits} qubits"
            )
    return targets


def _check_operator_shape(op: np.ndarray, targets: Sequence[int]) -> None:
    expected = 2 ** len(targets)
    if op.shape != (expected, expected):
        raise ValueError(
            f"operator of shape {op.shape} does not act on {len(targets)} qubit(s)"
        )


def conjugate(
    rho: np.ndarray, op: np.ndarray, targets: Sequence[int], num_qubits: int
) -> np.ndarray:
    """Return ``op rho op^dagger`` with ``op`` embedded on ``targets``.

    No validation is performed; callers are expected to have checked shapes.
    """
    k = len(targets)
    n = num_qubits
    tensor = rho.reshape([2] * (2 * n))
    op_tensor = op.reshape([2] * (2 * k))

    tensor = np.tensordot(op_tensor, tensor, axes=(list(range(k, 2 * k)), targets))
    tensor = np.moveaxis(tensor, list(range(k)), list(targets))

    col_axes = [n + t for t in targets]
    tensor = np.tensordot(
        tensor, op_tensor.conj(), axes=(col_axes, list(range(k, 2 * k)))
    )
    tensor = np.moveaxis(tensor, list(range(2 * n - k, 2 * n)), col_axes)
    return tensor.reshape(2**n, 2**n)


def apply_unitary(
    rho: np.ndarray, u: np.ndarray, targets: Sequence[int]
) -> np.ndarray:
    """Apply ``U rho U^dagger`` with ``U`` acting on ``targets``.

    Args:
        rho: Density matrix over N qubits.
        u: Unitary of dimension ``2**len(targets)``.
        targets: Distinct qubit indices, first target most significant.

    Returns:
        The transformed density matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    num_qubits = num_qubits_of(rho.shape[0])
    targets = _check_targets(targets, num_qubits)
    _check_operator_shape(u, targets)
    if not is_unitary(u):
        raise ValueError("operator is not unitary within 1e-8")
    return conjugate(rho, u, targets, num_qubits)


def check_kraus_completeness(
    kraus: Sequence[np.ndarray], atol: float = VALIDATION_ATOL
) -> None:
    """Raise ``ValueError`` unless ``sum K^dagger K == I`` within ``atol``."""
    if not kraus:
        raise ValueError("Kraus list is empty")
    dim = np.asarray(kraus[0]).shape[0]
    total = sum(np.asarray(k).conj().T @ np.asarray(k) for k in kraus)
    if not np.allclose(total, np.eye(dim), atol=atol):
        deviation = np.abs(total - np.eye(dim)).max()
        raise ValueError(
            f"Kraus operators violate completeness (max deviation {deviation:.3e})"
        )


def apply_kraus(
    rho: np.ndarray, kraus: Sequence[np.ndarray], targets: Sequence[int]
) -> np.ndarray:
    """Apply the channel ``sum_i K_i rho K_i^dagger`` on ``targets``."""
    rho = np.asarray(rho, dtype=complex)
    num_qubits = num_qubits_of(rho.shape[0])
    targets = _check_targets(targets, num_qubits)
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    for op in kraus:
        _check_operator_shape(op, targets)
    check_kraus_completeness(kraus)
    return apply_kraus_unchecked(rho, kraus, targets, num_qubits)


def apply_kraus_unchecked(
    rho: np.ndarray,
    kraus: Sequence[np.ndarray],
    targets: Sequence[int],
    num_qubits: int,
) -> np.ndarray:
    """Kraus application without validation, for pre-validated channels."""
    return sum(conjugate(rho, op, targets, num_qubits) for op in kraus)


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced state on ``keep``, qubits returned in the order given."""
    rho = np.asarray(rho, dtype=complex)
    num_qubits = num_qubits_of(rho.shape[0])
    if len(keep) == 0:
        raise ValueError("keep must name at least one qubit")
    keep = _check_targets(keep, num_qubits)

    tensor = rho.reshape([2] * (2 * num_qubits))
    remaining = num_qubits
    for qubit in sorted(set(range(num_qubits)) - set(keep), reverse=True):
        tensor = np.trace(tensor, axis1=qubit, axis2=qubit + remaining)
        remaining -= 1

    kept_sorted = sorted(keep)
    order = [kept_sorted.index(q) for q in keep]
    k = len(keep)
    tensor = tensor.transpose(order + [k + i for i in order])
    return tensor.reshape(2**k, 2**k)


def tensor_operator(
    operators: Sequence[np.ndarray],
    groups: Sequence[Sequence[int]],
    num_qubits: int,
) -> np.ndarray:
    """Full-register operator for operators on disjoint qubit groups.

    Qubits not covered by any group receive the identity.
    """
    order = [q for group in groups for q in group]
    missing = [q for q in range(num_qubits) if q not in order]
    full = kron_all(*operators, *([PAULI_I] * len(missing)))
    order += missing
    if sorted(order) != list(range(num_qubits)):
        raise ValueError("qubit groups overlap or fall outside the register")

    inverse = list(np.argsort(order))
    tensor = full.reshape([2] * (2 * num_qubits))
    tensor = tensor.transpose(inverse + [num_qubits + i for i in inverse])
    return tensor.reshape(2**num_qubits, 2**num_qubits)


def embed_operator(
    op: np.ndarray, targets: Sequence[int], num_qubits: int
) -> np.ndarray:
    """``op`` on ``targets`` and the identity elsewhere."""
    op = np.asarray(op, dtype=complex)
    targets = _check_targets(targets, num_qubits)
    _check_operator_shape(op, targets)
    return tensor_operator([op], [targets], num_qubits)


def tensor_ket(
    kets: Sequence[np.ndarray], groups: Sequence[Sequence[int]], num_qubits: int
) -> np.ndarray:
    """Full-register ket for a product of kets on disjoint qubit groups."""
    order = [q for group in groups for q in group]
    if sorted(order) != list(range(num_qubits)):
        raise ValueError("qubit groups must partition the register")
    full = kron_all(*(np.asarray(k).reshape(-1, 1) for k in kets)).reshape(-1)
    inverse = list(np.argsort(order))
    return full.reshape([2] * num_qubits).transpose(inverse).reshape(-1)


def apply_unitary_ket(
    ket: np.ndarray, u: np.ndarray, targets: Sequence[int]
) -> np.ndarray:
    """Apply ``u`` on ``targets`` of a statevector."""
    ket = np.asarray(ket, dtype=complex)
    num_qubits = num_qubits_of(ket.shape[0])
    k = len(targets)
    tensor = ket.reshape([2] * num_qubits)
    op_tensor = np.asarray(u, dtype=complex).reshape([2] * (2 * k))
    tensor = np.tensordot(op_tensor, tensor, axes=(list(range(k, 2 * k)), targets))
    tensor = np.moveaxis(tensor, list(range(k)), list(targets))
    return tensor.reshape(-1)


def ket_probabilities(ket: np.ndarray) -> np.ndarray:
    """Born-rule probabilities of a ket in the computational basis."""
    return np.abs(np.asarray(ket)) ** 2


def density_probabilities(rho: np.ndarray) -> np.ndarray:
    """Diagonal of a density matrix, clipped to be real and nonnegative."""
    return np.clip(np.real(np.diag(rho)), 0.0, None)


def eig3_sym_desc(r: np.ndarray) -> tuple[float, float, float]:
    """Eigenvalues of a real symmetric 3x3 matrix in descending order."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {r.shape}")
    if not np.allclose(r, r.T, atol=SELF_CHECK_ATOL):
        raise ValueError("matrix is not symmetric within 1e-10")
    mu = np.linalg.eigvalsh((r + r.T) / 2)[::-1]
    return float(mu[0]), float(mu[1]), float(mu[2])


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_ket(num_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state."""
    vector = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    return vector / np.linalg.norm(vector)


def random_density_matrix(
    num_qubits: int, rng: np.random.Generator, rank: int | None = None
) -> np.ndarray:
    """Random mixed state from the Ginibre ensemble."""
    dim = 2**num_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)
