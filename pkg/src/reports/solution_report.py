"""
Solution Report

Value, hider distribution and searcher strategy for a solved instance.
"""

from typing import Any

import pandas as pd

from ..core import format_decimal, format_rational
from ..indexable import GameSolution
from ..tree import TreeSolution
from . import BaseReport, register_report


def _value_line(label: str, value) -> str:
    return f"{label}: {format_rational(value)} ({format_decimal(value)})"


def _set_label(members) -> str:
    return "{" + ",".join(sorted(members)) + "}"


def _weights_frame(rows: list[tuple[str, Any]], column: str) -> pd.DataFrame:
    return pd.DataFrame(
        [(name, format_rational(w), format_decimal(w)) for name, w in rows],
        columns=[column, "weight", "decimal"],
    )


@register_report("solution")
class SolutionReport(BaseReport):
    """
    Payload:
        solution: GameSolution or TreeSolution
        document: the instance in file format (echoed in JSON for round trips)
        cost_paid: optional expected total cost (additive / travel-search view)
    """

    @property
    def solution(self) -> GameSolution | TreeSolution:
        return self.kwargs["solution"]

    def to_json(self) -> dict[str, Any]:
        data = {"instance": self.kwargs.get("document"), "solution": self.solution.to_dict()}
        data["solution"]["value_decimal"] = format_decimal(self.solution.value)
        cost_paid = self.kwargs.get("cost_paid")
        if cost_paid is not None:
            data["solution"]["cost_paid"] = format_rational(cost_paid)
        return data

    def to_text(self) -> str:
        solution = self.solution
        lines = [_value_line("value", solution.value)]
        cost_paid = self.kwargs.get("cost_paid")
        if cost_paid is not None:
            lines.append(_value_line("expected cost paid", cost_paid))

        if isinstance(solution, TreeSolution):
            lines.append("hider:")
            lines.append(
                _weights_frame(sorted(solution.hider.items()), "leaf").to_string(index=False)
            )
            lines.append("searcher (branch choices):")
            if solution.branch_choice:
                frame = pd.DataFrame(
                    [
                        (
                            v,
                            solution.first_branch(v),
                            format_rational(q),
                            format_rational(solution.lambdas[v]),
                        )
                        for v, q in sorted(solution.branch_choice.items())
                    ],
                    columns=["vertex", "first", "q", "lambda"],
                )
                lines.append(frame.to_string(index=False))
            else:
                lines.append("  (no branch vertices: the depth-first search is unique)")
            return "\n".join(lines)

        if solution.z is not None:
            lines.append(
                "z: " + " ".join(f"{i}={format_rational(v)}" for i, v in solution.z.as_dict().items())
            )
        lines.append("hider:")
        lines.append(
            _weights_frame(
                [(_set_label(h), w) for h, w in solution.hider.support], "set"
            ).to_string(index=False)
        )
        lines.append("searcher (s_A: search A first, rest uniformly at random):")
        lines.append(
            _weights_frame(
                [(_set_label(a), w) for a, w in solution.searcher.support], "first"
            ).to_string(index=False)
        )
        return "\n".join(lines)
