"""Cost gradients by the parameter-shift rule and by central differences."""

import logging
from collections.abc import Callable, Sequence

import numpy as np

from .objective import BellObjective

logger = logging.getLogger(__name__)

SHIFT = np.pi / 2
DEFAULT_STEP = 1e-5


class NonShiftableGateError(ValueError):
    """A parameter does not enter the circuit as a single Pauli rotation."""


def correlator_jacobian(
    objective: BellObjective, values: Sequence[float]
) -> tuple[np.ndarray, np.ndarray]:
    """Correlators and their Jacobian ``dC/dtheta`` at ``values``.

    Each correlator is an expectation value, so shifting a rotation angle
    by ``+-pi/2`` gives its exact derivative. Measurement shifts only touch
    the inputs where that block is active, and reuse the prepared state.
    """
    ansatz = objective.ansatz
    if not ansatz.shiftable:
        raise NonShiftableGateError(
            "parameter-shift gradients need Pauli-rotation gates; "
            "use central_difference for this ansatz"
        )
    sim = objective.simulator
    settings = objective.settings(values)
    values = settings.values
    layout = settings.layout

    prep = sim.prep_blocks(settings)
    state = sim.prepare(prep)
    table = sim.measurement_table(settings)
    node_inputs = [sim.wiring.node_inputs(x) for x in sim.inputs]
    base = np.array(
        [sim.correlator(state, sim.input_unitaries(table, x)) for x in sim.inputs]
    )

    jacobian = np.zeros((len(sim.inputs), layout.size))
    for index in range(layout.size):
        kind, owner, value = layout.owner(index)
        if kind == "prep":
            block = layout.prep_slices[owner]
            shifted = []
            for sign in (1.0, -1.0):
                params = [p.copy() for p in prep]
                params[owner][index - block.start] += sign * SHIFT
                shifted_state = sim.prepare(params)
                shifted.append(
                    np.array(
                        [
                            sim.correlator(shifted_state, sim.input_unitaries(table, x))
                            for x in sim.inputs
                        ]
                    )
                )
            jacobian[:, index] = (shifted[0] - shifted[1]) / 2
            continue

        block = layout.meas_slices[owner][value]
        active = [k for k, nx in enumerate(node_inputs) if nx[owner] == value]
        columns = []
        for sign in (1.0, -1.0):
            params = values[block].copy()
            params[index - block.start] += sign * SHIFT
            unitary = sim.node_unitary(owner, params)
            column = []
            for k in active:
                unitaries = sim.input_unitaries(table, sim.inputs[k])
                unitaries[owner] = unitary
                column.append(sim.correlator(state, unitaries))
            columns.append(np.array(column))
        jacobian[active, index] = (columns[0] - columns[1]) / 2
    return base, jacobian


def grad_parameter_shift(
    objective: BellObjective, values: Sequence[float]
) -> np.ndarray:
    """Exact cost gradient, ``-J^T dS/dC``."""
    correlators, jacobian = correlator_jacobian(objective, values)
    return -jacobian.T @ objective.inequality.score_gradient(correlators)


def grad_central_difference(
    cost: Callable[[np.ndarray], float],
    values: Sequence[float],
    h: float = DEFAULT_STEP,
) -> np.ndarray:
    """``(f(theta + h e_k) - f(theta - h e_k)) / 2h`` for every coordinate."""
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    values = np.asarray(values, dtype=float)
    grad = np.zeros_like(values)
    for k in range(values.size):
        step = np.zeros_like(values)
        step[k] = h
        grad[k] = (cost(values + step) - cost(values - step)) / (2 * h)
    return grad


def objective_gradient(
    objective: BellObjective, values: Sequence[float], method: str
) -> np.ndarray:
    """Cost gradient of ``objective`` using ``method``."""
    if method == "parameter_shift":
        return grad_parameter_shift(objective, values)
    if method == "central_difference":
        return grad_central_difference(objective.cost, values)
    raise ValueError(
        f"gradient must be parameter_shift or central_difference, got {method!r}"
    )


GRADIENT_METHODS = ("parameter_shift", "central_difference")
