"""
Report Rendering Module

Stdout renderers for solutions, best responses, verification outcomes and
sampled searches. Every report renders as human-readable text (pandas tables)
or as JSON with rationals kept as "num/den" strings.
"""

import json
from typing import Any, Literal

# Report type registry
REPORT_TYPES = {}

OutputFormat = Literal["text", "json"]


def register_report(report_type: str):
    """Decorator to register report classes."""

    def decorator(cls):
        REPORT_TYPES[report_type] = cls
        return cls

    return decorator


def generate_report(
    kind: Literal["solution", "best_response", "verification", "sample"],
    output_format: OutputFormat = "text",
    **kwargs,
) -> str:
    """
    Render a report of specified type.

    Args:
        kind: Report type identifier
        output_format: "text" or "json"
        **kwargs: Report-specific payload (solution, report, searches, ...)

    Returns:
        The rendered report

    Raises:
        ValueError: If report kind is not recognized

    Example:
        >>> print(generate_report("sample", searches=[("O", "A")]))
        O,A
    """
    if kind not in REPORT_TYPES:
        raise ValueError(
            f"Unknown report type: {kind}. " f"Supported types: {list(REPORT_TYPES.keys())}"
        )

    report_class = REPORT_TYPES[kind]
    report = report_class(output_format=output_format, **kwargs)
    return report.render()


def list_available_reports() -> list:
    """List all available report types."""
    return list(REPORT_TYPES.keys())


# Base report class
class BaseReport:
    """Base class for all report types."""

    def __init__(self, output_format: OutputFormat = "text", **kwargs):
        """
        Initialize report.

        Args:
            output_format: "text" or "json"
            **kwargs: Report payload
        """
        if output_format not in ("text", "json"):
            raise ValueError(f"Unknown output format: {output_format}")
        self.output_format = output_format
        self.kwargs = kwargs
        self.report_type = self.__class__.__name__

    def render(self) -> str:
        if self.output_format == "json":
            return json.dumps(self.to_json(), indent=2)
        return self.to_text()

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError("Subclasses must implement to_json()")

    def to_text(self) -> str:
        raise NotImplementedError("Subclasses must implement to_text()")


from .best_response_report import BestResponseReport  # noqa: E402
from .sample_report import SampleReport  # noqa: E402
from .solution_report import SolutionReport  # noqa: E402
from .verification_report import VerificationOutcomeReport  # noqa: E402

__all__ = [
    "generate_report",
    "list_available_reports",
    "BaseReport",
    "REPORT_TYPES",
    "BestResponseReport",
    "SampleReport",
    "SolutionReport",
    "VerificationOutcomeReport",
]
