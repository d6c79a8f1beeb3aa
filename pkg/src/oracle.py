"""
Brute-force verification through the full payoff matrix.

The matrix game is solved numerically (HiGHS through scipy, or fictitious play)
and the numeric mixes are then certified in exact arithmetic: each mix is turned
into rationals and its guaranteed payoff computed with Fractions, so
``lower <= value <= upper`` holds exactly whatever the float solver did.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import pandas as pd
from scipy.optimize import linprog

from .config import get_caps
from .core import (
    Instance,
    format_rational,
    prefix_payoff,
    s_a_expected_payoff,
)
from .errors import BudgetExceededError, InvalidArgumentError, ResourceLimitError
from .indexable import GameSolution, SetFunctionGame, require_valid_game, solve_closed_form, to_game
from .tree import (
    RootedTree,
    TreeSolution,
    enumerate_expanding_searches,
    require_valid_tree,
    search_payoff,
    searcher_guarantee,
    solve_tree,
)
from .utils.logging_config import StructuredLogger

logger = StructuredLogger("rescue_games.oracle")

Method = Literal["lp", "fictitious-play"]
DEFAULT_EPSILON = Fraction(1, 10**9)
DEFAULT_MAX_ITERATIONS = 100_000
_DENOMINATOR_BOUNDS = (10**2, 10**3, 10**4, 10**6, 10**9, 10**12)


def _label(strategy: Any) -> str:
    if isinstance(strategy, frozenset):
        return "{" + ",".join(sorted(strategy)) + "}"
    if isinstance(strategy, tuple):
        return ",".join(strategy)
    return str(strategy)


@dataclass(frozen=True)
class MatrixGame:
    """Searcher (row, maximizing) pure strategies against hider (column) pure strategies."""

    row_labels: tuple[Any, ...]
    col_labels: tuple[Any, ...]
    payoffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.row_labels or not self.col_labels:
            raise InvalidArgumentError("Matrix game needs at least one row and one column")
        if len(self.payoffs) != len(self.row_labels) or any(
            len(row) != len(self.col_labels) for row in self.payoffs
        ):
            raise InvalidArgumentError("Payoff dimensions do not match the labels")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> MatrixGame:
        """Unlabelled matrix (labels are row / column positions)."""
        payoffs = tuple(tuple(Fraction(v) for v in row) for row in rows)
        width = len(payoffs[0]) if payoffs else 0
        return cls(tuple(range(len(payoffs))), tuple(range(width)), payoffs)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.payoffs], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[format_rational(v) for v in row] for row in self.payoffs],
            index=[_label(r) for r in self.row_labels],
            columns=[_label(c) for c in self.col_labels],
        )


def _check_entries(rows: int, cols: int, cap: int | None) -> None:
    cap = cap if cap is not None else get_caps().matrix_entries
    if rows * cols > cap:
        raise ResourceLimitError(
            f"Payoff matrix would have {rows} x {cols} entries, over the cap of {cap}",
            cap=cap,
            size=rows * cols,
        )


def build_matrix_unstructured(
    target: Instance | SetFunctionGame, cap: int | None = None
) -> MatrixGame:
    """Rows: all n! orderings. Columns: all k-subsets. Entries: P(H, sigma)."""
    game = require_valid_game(to_game(target))
    ids = game.ids
    n, k = len(ids), game.k
    _check_entries(math.factorial(n), math.comb(n, k), cap)
    cols = tuple(frozenset(h) for h in itertools.combinations(ids, k))
    rows = tuple(itertools.permutations(ids))
    payoffs = tuple(
        tuple(prefix_payoff(game.spec.evaluate, h, order) for h in cols) for order in rows
    )
    logger.log_event("matrix_built", level="DEBUG", game="unstructured", rows=len(rows), cols=len(cols))
    return MatrixGame(rows, cols, payoffs)


def build_matrix_tree(
    tree: RootedTree,
    include_all_vertices: bool = False,
    cap: int | None = None,
    search_cap: int | None = None,
) -> MatrixGame:
    """
    Rows: all expanding searches. Columns: leaves, or every vertex when asked.

    ``cap`` bounds the number of matrix entries, as for the unstructured
    builder; ``search_cap`` bounds the number of expanding searches enumerated.
    """
    require_valid_tree(tree)
    rows = tuple(enumerate_expanding_searches(tree, search_cap))
    cols = tuple(tree.ids) if include_all_vertices else tree.leaves
    _check_entries(len(rows), len(cols), cap)
    payoffs = tuple(tuple(search_payoff(tree, v, order) for v in cols) for order in rows)
    logger.log_event("matrix_built", level="DEBUG", game="tree", rows=len(rows), cols=len(cols))
    return MatrixGame(rows, cols, payoffs)


@dataclass(frozen=True)
class OracleSolution:
    """
    Certified solution: ``lower`` is what row_mix guarantees, ``upper`` what
    col_mix concedes, both exact. The true value lies between them.
    """

    value: Fraction
    lower: Fraction
    upper: Fraction
    row_mix: tuple[Fraction, ...]
    col_mix: tuple[Fraction, ...]
    best_col_response: int
    best_row_response: int
    epsilon: Fraction
    method: str

    @property
    def exact_value(self) -> Fraction | None:
        return self.lower if self.lower == self.upper else None

    @property
    def gap(self) -> Fraction:
        return self.upper - self.lower

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": format_rational(self.value),
            "exact": self.exact_value is not None,
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "method": self.method,
        }


def _row_guarantee(payoffs: tuple[tuple[Fraction, ...], ...], mix: Sequence[Fraction]) -> tuple[Fraction, int]:
    """min over columns of mix . A[:, j], with the minimizing column."""
    width = len(payoffs[0])
    totals = [Fraction(0)] * width
    for weight, row in zip(mix, payoffs, strict=True):
        if weight:
            for j, entry in enumerate(row):
                totals[j] += weight * entry
    best = min(range(width), key=lambda j: (totals[j], j))
    return totals[best], best


def _col_concession(payoffs: tuple[tuple[Fraction, ...], ...], mix: Sequence[Fraction]) -> tuple[Fraction, int]:
    """max over rows of A[i] . mix, with the maximizing row."""
    totals = [
        sum((w * entry for w, entry in zip(mix, row, strict=True) if w), Fraction(0))
        for row in payoffs
    ]
    best = max(range(len(totals)), key=lambda i: (totals[i], -i))
    return totals[best], best


def _rational_candidates(weights: np.ndarray) -> list[tuple[Fraction, ...]]:
    clipped = np.clip(weights, 0.0, None)
    exact = [Fraction(float(w)) for w in clipped]
    candidates = []
    for bound in _DENOMINATOR_BOUNDS:
        rounded = [w.limit_denominator(bound) for w in exact]
        candidates.append(rounded)
    candidates.append(exact)
    normalized: dict[tuple[Fraction, ...], None] = {}
    for candidate in candidates:
        total = sum(candidate, Fraction(0))
        if total > 0:
            normalized[tuple(w / total for w in candidate)] = None
    return list(normalized)


def _lp_mixes(game: MatrixGame) -> tuple[np.ndarray, np.ndarray]:
    matrix = game.as_array()
    m, n = matrix.shape
    options = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}

    # row player: maximize v s.t. x . A[:, j] >= v, sum x = 1
    row = linprog(
        c=np.r_[np.zeros(m), -1.0],
        A_ub=np.c_[-matrix.T, np.ones(n)],
        b_ub=np.zeros(n),
        A_eq=np.r_[np.ones(m), 0.0].reshape(1, -1),
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs-ds",
        options=options,
    )
    # column player: minimize u s.t. A[i] . y <= u, sum y = 1
    col = linprog(
        c=np.r_[np.zeros(n), 1.0],
        A_ub=np.c_[matrix, -np.ones(m)],
        b_ub=np.zeros(m),
        A_eq=np.r_[np.ones(n), 0.0].reshape(1, -1),
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs-ds",
        options=options,
    )
    if row.status != 0 or col.status != 0:
        raise BudgetExceededError(
            f"Linear program did not solve: {row.message} / {col.message}",
            cap=0,
            size=m * n,
            lower=None,
            upper=None,
        )
    return row.x[:m], col.x[:n]


def _fictitious_play(
    game: MatrixGame, epsilon: Fraction, max_iterations: int
) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction, Fraction, int, int]:
    """Deterministic fictitious play (lowest index wins ties); mixes are exact counts."""
    matrix = game.as_array()
    m, n = matrix.shape
    row_cum = np.zeros(m)
    col_cum = np.zeros(n)
    row_counts = np.zeros(m, dtype=np.int64)
    col_counts = np.zeros(n, dtype=np.int64)
    checkpoint = 64
    lower = upper = Fraction(0)
    best_col = best_row = 0
    for step in range(1, max_iterations + 1):
        active_row = int(np.argmax(row_cum))
        row_counts[active_row] += 1
        col_cum += matrix[active_row]
        active_col = int(np.argmin(col_cum))
        col_counts[active_col] += 1
        row_cum += matrix[:, active_col]
        if step == checkpoint or step == max_iterations:
            row_mix = tuple(Fraction(int(c), step) for c in row_counts)
            col_mix = tuple(Fraction(int(c), step) for c in col_counts)
            lower, best_col = _row_guarantee(game.payoffs, row_mix)
            upper, best_row = _col_concession(game.payoffs, col_mix)
            if upper - lower <= 2 * epsilon:
                return row_mix, col_mix, lower, upper, best_col, best_row
            checkpoint *= 2
    raise BudgetExceededError(
        f"Fictitious play left a gap of {float(upper - lower):.3g} after {max_iterations} iterations",
        cap=max_iterations,
        size=m * n,
        lower=format_rational(lower),
        upper=format_rational(upper),
    )


def solve_matrix(
    game: MatrixGame,
    epsilon: Fraction | float = DEFAULT_EPSILON,
    method: Method = "lp",
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> OracleSolution:
    """Solve the zero-sum game and certify ``upper - lower <= 2 * epsilon`` exactly."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")

    if method == "lp":
        row_weights, col_weights = _lp_mixes(game)
        best_lower: tuple[Fraction, int, tuple[Fraction, ...]] | None = None
        for mix in _rational_candidates(row_weights):
            guarantee, col = _row_guarantee(game.payoffs, mix)
            if best_lower is None or guarantee > best_lower[0]:
                best_lower = (guarantee, col, mix)
        best_upper: tuple[Fraction, int, tuple[Fraction, ...]] | None = None
        for mix in _rational_candidates(col_weights):
            concession, row = _col_concession(game.payoffs, mix)
            if best_upper is None or concession < best_upper[0]:
                best_upper = (concession, row, mix)
        assert best_lower is not None and best_upper is not None
        lower, best_col, row_mix = best_lower
        upper, best_row, col_mix = best_upper
        if upper - lower > 2 * epsilon:
            raise BudgetExceededError(
                f"LP solution certifies only a gap of {float(upper - lower):.3g}",
                cap=max_iterations,
                size=len(game.row_labels) * len(game.col_labels),
                lower=format_rational(lower),
                upper=format_rational(upper),
            )
    elif method == "fictitious-play":
        row_mix, col_mix, lower, upper, best_col, best_row = _fictitious_play(
            game, epsilon, max_iterations
        )
    else:
        raise InvalidArgumentError(f"Unknown oracle method {method!r}; use 'lp' or 'fictitious-play'")

    value = lower if lower == upper else (lower + upper) / 2
    solution = OracleSolution(
        value, lower, upper, row_mix, col_mix, best_col, best_row, epsilon, method
    )
    logger.log_event(
        "matrix_solved",
        level="DEBUG",
        method=method,
        rows=len(game.row_labels),
        cols=len(game.col_labels),
        lower=lower,
        upper=upper,
        exact=solution.exact_value is not None,
    )
    return solution


@dataclass(frozen=True)
class Counterexample:
    """A pure strategy that breaks one of the certificates."""

    check: Literal["hider_certificate", "searcher_certificate", "value"]
    strategy: str
    payoff: Fraction
    bound: Fraction

    def to_dict(self) -> dict[str, str]:
        return {
            "check": self.check,
            "strategy": self.strategy,
            "payoff": format_rational(self.payoff),
            "bound": format_rational(self.bound),
        }


@dataclass(frozen=True)
class VerificationReport:
    target: Literal["unstructured", "tree"]
    passed: bool
    oracle: OracleSolution
    rows: int
    cols: int
    closed_form_value: Fraction | None = None
    equalizing: bool | None = None
    counterexamples: list[Counterexample] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "passed": self.passed,
            "matrix": {"rows": self.rows, "cols": self.cols},
            "closed_form_value": (
                format_rational(self.closed_form_value)
                if self.closed_form_value is not None
                else None
            ),
            "equalizing": self.equalizing,
            "oracle": self.oracle.to_dict(),
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }


def _value_check(value: Fraction, oracle: OracleSolution) -> Counterexample | None:
    eps = oracle.epsilon
    if oracle.lower - eps <= value <= oracle.upper + eps:
        return None
    bound = oracle.lower if value < oracle.lower else oracle.upper
    return Counterexample("value", "oracle", value, bound)


def _verify_unstructured(
    game: SetFunctionGame,
    solution: GameSolution | None,
    matrix: MatrixGame,
    oracle: OracleSolution,
) -> tuple[Fraction | None, bool | None, list[Counterexample]]:
    if solution is None:
        solution = solve_closed_form(game.spec, game.k)
    value = solution.value
    failures: list[Counterexample] = []

    column = {h: j for j, h in enumerate(matrix.col_labels)}
    hider = [(column[h], w) for h, w in solution.hider.support]
    row_payoffs = [
        sum((w * matrix.payoffs[i][j] for j, w in hider), Fraction(0))
        for i in range(len(matrix.row_labels))
    ]
    for order, payoff in zip(matrix.row_labels, row_payoffs, strict=True):
        if payoff > value:
            failures.append(Counterexample("hider_certificate", _label(order), payoff, value))

    for h in matrix.col_labels:
        if solution.searcher.form == "s_a":
            payoff = sum(
                (w * s_a_expected_payoff(game.spec.evaluate, game.ids, h, a)
                 for a, w in solution.searcher.support),
                Fraction(0),
            )
        else:
            payoff = sum(
                (w * prefix_payoff(game.spec.evaluate, h, order)
                 for order, w in solution.searcher.support),
                Fraction(0),
            )
        if payoff < value:
            failures.append(Counterexample("searcher_certificate", _label(h), payoff, value))

    mismatch = _value_check(value, oracle)
    if mismatch:
        failures.append(mismatch)
    return value, len(set(row_payoffs)) == 1, failures


def _verify_tree(
    tree: RootedTree,
    solution: TreeSolution | None,
    matrix: MatrixGame,
    oracle: OracleSolution,
) -> tuple[Fraction | None, bool | None, list[Counterexample]]:
    if solution is None:
        solution = solve_tree(tree)
    value = solution.value
    failures: list[Counterexample] = []

    row_payoffs = [
        sum((w * search_payoff(tree, v, order) for v, w in solution.hider.items()), Fraction(0))
        for order in matrix.row_labels
    ]
    for order, payoff in zip(matrix.row_labels, row_payoffs, strict=True):
        if payoff > value:
            failures.append(Counterexample("hider_certificate", _label(order), payoff, value))

    for v in matrix.col_labels:
        payoff = searcher_guarantee(tree, solution, v, allow_internal=True)
        if payoff < value:
            failures.append(Counterexample("searcher_certificate", v, payoff, value))

    mismatch = _value_check(value, oracle)
    if mismatch:
        failures.append(mismatch)
    return value, None, failures


def verify(
    target: Instance | SetFunctionGame | RootedTree,
    solution: GameSolution | TreeSolution | None = None,
    epsilon: Fraction | float = DEFAULT_EPSILON,
    method: Method = "lp",
    include_all_vertices: bool = False,
    oracle_only: bool = False,
    cap: int | None = None,
) -> VerificationReport:
    """
    Compare the closed-form solution with the oracle and check both strategy
    certificates exactly: no pure search beats the hider mix and no pure hiding
    choice beats the searcher mix. Failures come back as counterexamples.
    """
    if isinstance(target, RootedTree):
        kind: Literal["unstructured", "tree"] = "tree"
        matrix = build_matrix_tree(target, include_all_vertices, cap)
    else:
        kind = "unstructured"
        game = require_valid_game(to_game(target))
        matrix = build_matrix_unstructured(game, cap)
    oracle = solve_matrix(matrix, epsilon, method)

    value: Fraction | None = None
    equalizing: bool | None = None
    failures: list[Counterexample] = []
    if not oracle_only:
        if kind == "tree":
            assert isinstance(target, RootedTree)
            assert solution is None or isinstance(solution, TreeSolution)
            value, equalizing, failures = _verify_tree(target, solution, matrix, oracle)
        else:
            assert solution is None or isinstance(solution, GameSolution)
            value, equalizing, failures = _verify_unstructured(game, solution, matrix, oracle)

    rows, cols = matrix.shape
    report = VerificationReport(
        kind, not failures, oracle, rows, cols, value, equalizing, failures
    )
    logger.log_event(
        "verification_completed",
        level="INFO" if report.passed else "WARNING",
        target=kind,
        passed=report.passed,
        rows=rows,
        cols=cols,
        counterexamples=len(failures),
        oracle_value=oracle.value,
    )
    return report
