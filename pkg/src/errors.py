"""Error hierarchy shared by the solver modules and the CLI exit-code contract."""

from __future__ import annotations

from typing import Any

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_UNSUPPORTED = 3
EXIT_RESOURCE_LIMIT = 4


class RescueGameError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes a command."""

    exit_code: int = EXIT_VERIFICATION_FAILED

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.details}


class InvalidArgumentError(RescueGameError, ValueError):
    """Input violates a documented precondition (unknown id, bad range, malformed file)."""

    exit_code = EXIT_INPUT_ERROR


class InvalidSpecError(InvalidArgumentError):
    """A set-function spec is malformed, e.g. a table missing a subset."""


class UndefinedIndexError(InvalidArgumentError):
    """Subsearch index requested for a vertex set with pi(A) = 1."""


class UnsupportedError(RescueGameError):
    """The closed-form machinery does not cover this input."""

    exit_code = EXIT_UNSUPPORTED


class NotIndexableError(UnsupportedError):
    """Set function failed the z-indexability check; ``report`` names the witness."""

    def __init__(self, message: str, report: Any = None, **details: Any) -> None:
        super().__init__(message, **details)
        self.report = report


class ResourceLimitError(RescueGameError):
    """An enumeration would exceed its cap. Caps fail loudly, never sample."""

    exit_code = EXIT_RESOURCE_LIMIT

    def __init__(self, message: str, cap: int, size: int, **details: Any) -> None:
        super().__init__(message, cap=cap, size=size, **details)
        self.cap = cap
        self.size = size


class BudgetExceededError(ResourceLimitError):
    """Iterative matrix solve did not close the value gap within its budget."""

    def __init__(self, message: str, cap: int, size: int, lower: Any, upper: Any) -> None:
        super().__init__(message, cap=cap, size=size, lower=str(lower), upper=str(upper))
        self.lower = lower
        self.upper = upper
