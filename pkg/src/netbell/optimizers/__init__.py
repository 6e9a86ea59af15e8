"""Variational optimization of Bell scores."""

from .descent import (
    OptimizationResult,
    OptimizationTrace,
    OptimizerConfig,
    default_step_size,
    gradient_descent,
    optimize,
    optimize_fixed_state,
)
from .gradients import (
    NonShiftableGateError,
    correlator_jacobian,
    grad_central_difference,
    grad_parameter_shift,
    objective_gradient,
)
from .objective import BellObjective
from .scan import ScanPoint, ScanResult, gamma_grid, oracle_value, scan

__all__ = [
    "BellObjective",
    "NonShiftableGateError",
    "OptimizationResult",
    "OptimizationTrace",
    "OptimizerConfig",
    "ScanPoint",
    "ScanResult",
    "correlator_jacobian",
    "default_step_size",
    "gamma_grid",
    "grad_central_difference",
    "grad_parameter_shift",
    "gradient_descent",
    "objective_gradient",
    "optimize",
    "optimize_fixed_state",
    "oracle_value",
    "scan",
]
