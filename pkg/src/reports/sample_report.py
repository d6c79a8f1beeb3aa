"""
Sample Report

Sampled searches, one per line.
"""

from typing import Any

from . import BaseReport, register_report


@register_report("sample")
class SampleReport(BaseReport):
    """Payload: searches (list of vertex / location sequences)."""

    def to_json(self) -> dict[str, Any]:
        return {"searches": [list(search) for search in self.kwargs["searches"]]}

    def to_text(self) -> str:
        return "\n".join(",".join(search) for search in self.kwargs["searches"])
