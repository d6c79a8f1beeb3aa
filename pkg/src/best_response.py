"""
Pure best responses to a known single-target hider distribution x.

For a z-indexable f the payoff sum_i x_sigma(i) f(S_i) is maximized by searching in
non-increasing order of x_i / z_i and minimized by the reverse rule; the brute-force
path enumerates every ordering and exists to cross-check that claim.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal

from .config import get_caps
from .core import SearchOrder, as_rational, check_order, format_rational
from .errors import InvalidArgumentError, ResourceLimitError
from .indexable import SetFunctionSpec, recover_z
from .utils.logging_config import StructuredLogger

logger = StructuredLogger("rescue_games.best_response")

Direction = Literal["maximize", "minimize"]


@dataclass(frozen=True)
class ResponseProblem:
    """A set function plus the hider's distribution over its locations."""

    spec: SetFunctionSpec
    x: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.x) != len(self.spec.ids):
            raise InvalidArgumentError(
                f"Hider distribution has {len(self.x)} entries for {len(self.spec.ids)} locations"
            )
        if any(weight < 0 for weight in self.x):
            raise InvalidArgumentError("Hider distribution entries must be nonnegative")
        total = sum(self.x, Fraction(0))
        if total != 1:
            raise InvalidArgumentError(
                f"Hider distribution sums to {format_rational(total)}, expected 1"
            )

    @classmethod
    def from_weights(
        cls, spec: SetFunctionSpec, x: Sequence[Any] | Mapping[str, Any]
    ) -> ResponseProblem:
        """Accept a list in location order or an id -> weight mapping (missing ids get 0)."""
        if isinstance(x, Mapping):
            unknown = sorted(set(x) - set(spec.ids))
            if unknown:
                raise InvalidArgumentError(f"Hider distribution names unknown locations: {unknown}")
            weights = tuple(as_rational(x.get(i, 0)) for i in spec.ids)
        else:
            weights = tuple(as_rational(w) for w in x)
        return cls(spec, weights)

    @property
    def weights(self) -> dict[str, Fraction]:
        return dict(zip(self.spec.ids, self.x, strict=True))


def _check_direction(direction: str) -> None:
    if direction not in ("maximize", "minimize"):
        raise InvalidArgumentError(f"direction must be 'maximize' or 'minimize', got {direction!r}")


def response_payoff(problem: ResponseProblem, sigma: Sequence[str]) -> Fraction:
    """sum_i x_sigma(i) * f(first i locations of sigma)."""
    order = check_order(problem.spec.ids, sigma)
    weights = problem.weights
    searched: set[str] = set()
    total = Fraction(0)
    for location in order:
        searched.add(location)
        if weights[location]:
            total += weights[location] * problem.spec.evaluate(frozenset(searched))
    return total


def index_values(problem: ResponseProblem) -> dict[str, Fraction]:
    """x_i / z_i, with the family's own z scale when it has one (x_i p_i / (1 - p_i) for rescue)."""
    z = recover_z(problem.spec)
    raw = problem.spec.analytic_z() or z.z
    return {i: w / zi for i, w, zi in zip(problem.spec.ids, problem.x, raw, strict=True)}


def index_order(problem: ResponseProblem, direction: Direction = "maximize") -> SearchOrder:
    """Sort by index; ties keep location-list order."""
    _check_direction(direction)
    indices = index_values(problem)
    sign = -1 if direction == "maximize" else 1
    position = {i: pos for pos, i in enumerate(problem.spec.ids)}
    order = tuple(sorted(problem.spec.ids, key=lambda i: (sign * indices[i], position[i])))
    logger.log_event(
        "best_response_computed",
        level="DEBUG",
        method="index",
        direction=direction,
        order=list(order),
    )
    return order


def best_response_bruteforce(
    problem: ResponseProblem, direction: Direction = "maximize", cap: int | None = None
) -> tuple[SearchOrder, Fraction]:
    """Exhaustive optimum over all n! orderings; the first optimum in lexicographic order wins."""
    _check_direction(direction)
    cap = cap if cap is not None else get_caps().brute_force_n
    n = len(problem.spec.ids)
    if n > cap:
        raise ResourceLimitError(
            f"Brute-force best response over {n}! orderings exceeds n-cap {cap}", cap=cap, size=n
        )
    better = (lambda a, b: a > b) if direction == "maximize" else (lambda a, b: a < b)
    best_order: SearchOrder | None = None
    best_value = Fraction(0)
    for order in itertools.permutations(problem.spec.ids):
        value = response_payoff(problem, order)
        if best_order is None or better(value, best_value):
            best_order, best_value = order, value
    assert best_order is not None
    logger.log_event(
        "best_response_computed",
        level="DEBUG",
        method="bruteforce",
        direction=direction,
        order=list(best_order),
        payoff=best_value,
    )
    return best_order, best_value


def interchange_delta(problem: ResponseProblem, sigma: Sequence[str], position: int) -> Fraction:
    """Payoff change from swapping sigma[position] and sigma[position + 1]."""
    order = check_order(problem.spec.ids, sigma)
    if not 0 <= position < len(order) - 1:
        raise InvalidArgumentError(f"No adjacent pair at position {position}")
    swapped = list(order)
    swapped[position], swapped[position + 1] = swapped[position + 1], swapped[position]
    return response_payoff(problem, swapped) - response_payoff(problem, order)
