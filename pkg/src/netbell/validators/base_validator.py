"""Validation types shared by the config checks and the acceptance criteria.

A validator collects ``ValidationError`` issues while it runs and hands
them back as one ``ValidationResult``. Config issues carry the dotted field
path they concern (``noise.gamma``); acceptance issues carry the criterion.
"""

from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class ValidationLevel(Enum):
    """Severity of a validation issue."""

    ERROR = "error"  # run refused or criterion failed
    WARNING = "warning"
    INFO = "info"
    SUCCESS = "success"  # passed check, reported for the summary


@dataclass(frozen=True)
class ValidationError:
    """One issue found by a validator."""

    level: ValidationLevel
    message: str
    field: str | None = None
    context: str | None = None
    suggestion: str | None = None
    code: str | None = None

    def __str__(self) -> str:
        head = f"[{self.level.value.upper()}]"
        if self.field:
            head += f" ({self.field})"
        lines = [f"{head} {self.message}"]
        if self.context:
            lines.append(f"  Context: {self.context}")
        if self.suggestion:
            lines.append(f"  Suggestion: {self.suggestion}")
        return "\n".join(lines)


@dataclass
class ValidationResult:
    """Issues gathered by one validator run, plus run metadata."""

    validator_name: str
    errors: list[ValidationError]
    metadata: dict[str, Any] = field(default_factory=dict)

    def _counts(self) -> Counter:
        return Counter(issue.level for issue in self.errors)

    @property
    def error_count(self) -> int:
        return self._counts()[ValidationLevel.ERROR]

    @property
    def warning_count(self) -> int:
        return self._counts()[ValidationLevel.WARNING]

    @property
    def has_errors(self) -> bool:
        return self.error_count > 0

    @property
    def has_warnings(self) -> bool:
        return self.warning_count > 0

    def by_level(self, level: ValidationLevel) -> list[ValidationError]:
        """Issues of one severity, in the order they were found."""
        return [issue for issue in self.errors if issue.level is level]

    def fields(self) -> list[str]:
        """Field paths named by error-level issues."""
        return [
            issue.field for issue in self.by_level(ValidationLevel.ERROR) if issue.field
        ]


class BaseValidator(ABC):
    """Collects issues during ``validate`` and packages them as a result."""

    def __init__(self, name: str | None = None):
        """Initialize with a display name, defaulting to the class name."""
        self.name = name or self.__class__.__name__
        self.errors: list[ValidationError] = []

    @abstractmethod
    def validate(self) -> ValidationResult:
        """Run the checks and return the collected issues."""

    def _report(
        self, level: ValidationLevel, message: str, **details: str | None
    ) -> None:
        """Record an issue; ``details`` are ``ValidationError`` keyword fields."""
        self.errors.append(ValidationError(level, message, **details))

    def _result(self, **metadata: Any) -> ValidationResult:
        """Hand over the collected issues and start a fresh list."""
        issues, self.errors = self.errors, []
        return ValidationResult(self.name, issues, dict(metadata))
