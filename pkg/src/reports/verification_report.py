"""
Verification Report

Outcome of comparing a closed-form solution with the matrix-game oracle, per
instance file, with the counterexamples that broke any certificate.
"""

from typing import Any

import pandas as pd

from ..core import format_decimal, format_rational
from . import BaseReport, register_report


@register_report("verification")
class VerificationOutcomeReport(BaseReport):
    """
    Payload:
        outcomes: list of (path, VerificationReport | None, error message | None)
    """

    def to_json(self) -> dict[str, Any]:
        results = []
        for path, report, error in self.kwargs["outcomes"]:
            entry: dict[str, Any] = {"file": str(path)}
            if report is not None:
                entry.update(report.to_dict())
            else:
                entry["error"] = error
            results.append(entry)
        return {"results": results}

    def to_text(self) -> str:
        blocks = []
        for path, report, error in self.kwargs["outcomes"]:
            if report is None:
                blocks.append(f"{path}: ERROR {error}")
                continue
            oracle = report.oracle
            status = "PASS" if report.passed else "FAIL"
            lines = [f"{path}: {status}"]
            lines.append(f"  matrix: {report.rows} x {report.cols}")
            if report.closed_form_value is not None:
                lines.append(
                    f"  closed-form value: {format_rational(report.closed_form_value)} "
                    f"({format_decimal(report.closed_form_value)})"
                )
            exactness = "exact" if oracle.exact_value is not None else "bounds"
            lines.append(
                f"  oracle value: {format_rational(oracle.value)} ({format_decimal(oracle.value)}, "
                f"{exactness} via {oracle.method}, lower {format_rational(oracle.lower)}, "
                f"upper {format_rational(oracle.upper)})"
            )
            if report.equalizing is not None:
                lines.append(f"  hider mix equalizes every search: {report.equalizing}")
            if report.counterexamples:
                frame = pd.DataFrame([c.to_dict() for c in report.counterexamples])
                lines.append("  counterexamples:")
                lines.append(frame.to_string(index=False))
            blocks.append("\n".join(lines))
        return "\n".join(blocks)
