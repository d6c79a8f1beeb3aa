"""
Best Response Report

Index values, the chosen order and its exact payoff.
"""

from typing import Any

import pandas as pd

from ..core import format_decimal, format_rational
from . import BaseReport, register_report


@register_report("best_response")
class BestResponseReport(BaseReport):
    """Payload: indices (id -> x_i/z_i), order, payoff, direction."""

    def to_json(self) -> dict[str, Any]:
        return {
            "direction": self.kwargs["direction"],
            "indices": {i: format_rational(v) for i, v in self.kwargs["indices"].items()},
            "order": list(self.kwargs["order"]),
            "payoff": format_rational(self.kwargs["payoff"]),
        }

    def to_text(self) -> str:
        indices = self.kwargs["indices"]
        frame = pd.DataFrame(
            [(i, format_rational(v), format_decimal(v)) for i, v in indices.items()],
            columns=["location", "index", "decimal"],
        )
        payoff = self.kwargs["payoff"]
        return "\n".join(
            [
                f"direction: {self.kwargs['direction']}",
                frame.to_string(index=False),
                "order: " + ",".join(self.kwargs["order"]),
                f"payoff: {format_rational(payoff)} ({format_decimal(payoff)})",
            ]
        )
