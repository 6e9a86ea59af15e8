"""Validation system for netbell.

This package validates run configurations and runs the acceptance
criteria behind ``netbell verify``.
"""

from .acceptance import (
    CRITERIA,
    FAULT_TARGETS,
    AcceptanceCriterion,
    run_criteria,
)
from .base_validator import (
    BaseValidator,
    ValidationError,
    ValidationLevel,
    ValidationResult,
)
from .config_validator import RunConfigValidator

__all__ = [
    "BaseValidator",
    "ValidationResult",
    "ValidationError",
    "ValidationLevel",
    "RunConfigValidator",
    "AcceptanceCriterion",
    "CRITERIA",
    "FAULT_TARGETS",
    "run_criteria",
]
