"""
Exact payoff evaluation for the unstructured search-and-rescue game.

A Hider places k targets among n locations; the Searcher orders the locations.
Searching location i ends the search with probability 1 - p_i. The payoff of a
(hider set, ordering) pair is the probability the Searcher survives until every
target has been found.

All probabilities, weights and payoffs are ``fractions.Fraction``: nothing in
this module rounds.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Literal

from .errors import InvalidArgumentError
from .utils.logging_config import StructuredLogger

logger = StructuredLogger("rescue_games.core")

Rational = Fraction
HiderSet = frozenset[str]
SearchOrder = tuple[str, ...]
RewardFunction = Callable[[frozenset[str]], Fraction]

_RATIONAL_PATTERN = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def as_rational(value: Any) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings. Floats and decimals are rejected."""
    if isinstance(value, bool):
        raise InvalidArgumentError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL_PATTERN.match(value)
        if not match:
            raise InvalidArgumentError(
                f"Malformed rational {value!r}: expected 'num/den' or an integer, "
                "decimal literals are not accepted"
            )
        numerator, denominator = match.group(1), match.group(2)
        if denominator is not None and int(denominator) == 0:
            raise InvalidArgumentError(f"Zero denominator in {value!r}")
        return Fraction(int(numerator), int(denominator or 1))
    raise InvalidArgumentError(f"Not a rational: {value!r} ({type(value).__name__})")


def format_rational(value: Fraction) -> str:
    """Render as "num/den" (bare integer when the denominator is 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction | float) -> str:
    """Human-readable approximation, 12 significant digits."""
    return format(float(value), ".12g")


@dataclass(frozen=True)
class Location:
    id: str
    p: Fraction


@dataclass(frozen=True)
class ValidationIssue:
    """One violated invariant, with the same severity/remediation metadata the validators attach."""

    code: str
    message: str
    severity: str = "critical"
    remediation: str = ""
    subject: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class Instance:
    """Locations with survival probabilities and a target count k."""

    locations: tuple[Location, ...]
    k: int

    @classmethod
    def from_probabilities(
        cls,
        probabilities: Sequence[Any] | Mapping[str, Any],
        k: int,
    ) -> Instance:
        """Build from a list (ids "1".."n") or an id -> probability mapping."""
        if isinstance(probabilities, Mapping):
            items = [(str(i), as_rational(p)) for i, p in probabilities.items()]
        else:
            items = [(str(pos + 1), as_rational(p)) for pos, p in enumerate(probabilities)]
        return cls(tuple(Location(i, p) for i, p in items), k)

    @cached_property
    def ids(self) -> SearchOrder:
        return tuple(loc.id for loc in self.locations)

    @property
    def n(self) -> int:
        return len(self.locations)

    @cached_property
    def probabilities(self) -> dict[str, Fraction]:
        return {loc.id: loc.p for loc in self.locations}

    @cached_property
    def position(self) -> dict[str, int]:
        """Canonical index of each id (its place in the location list)."""
        return {loc_id: pos for pos, loc_id in enumerate(self.ids)}


def validate(instance: Instance) -> list[ValidationIssue]:
    """Check every Instance invariant and report all violations (empty list means ok)."""
    issues: list[ValidationIssue] = []
    seen: set[str] = set()
    for loc in instance.locations:
        if loc.id in seen:
            issues.append(
                ValidationIssue(
                    code="duplicate_id",
                    message=f"Location id {loc.id!r} appears more than once",
                    remediation="Give every location a distinct id.",
                    subject=loc.id,
                )
            )
        seen.add(loc.id)
        if not 0 < loc.p < 1:
            issues.append(
                ValidationIssue(
                    code="probability_out_of_range",
                    message=f"p[{loc.id}] = {format_rational(loc.p)} is outside (0, 1)",
                    remediation="Survival probabilities must satisfy 0 < p < 1; "
                    "p = 0 and p = 1 make the location trivial.",
                    subject=loc.id,
                )
            )
    n = instance.n
    if not 1 <= instance.k <= n - 1:
        issues.append(
            ValidationIssue(
                code="k_out_of_range",
                message=f"k = {instance.k} must satisfy 1 <= k <= n - 1 = {n - 1}",
                remediation="Hide at least one and at most n - 1 targets.",
            )
        )
    logger.log_event(
        "instance_validated", level="DEBUG", n=n, k=instance.k, issues=len(issues)
    )
    return issues


def require_valid(instance: Instance) -> Instance:
    issues = validate(instance)
    if issues:
        raise InvalidArgumentError(
            "Invalid instance: " + "; ".join(issue.message for issue in issues),
            issues=[issue.to_dict() for issue in issues],
        )
    return instance


def check_subset(known: Iterable[str], members: Iterable[str]) -> frozenset[str]:
    known_set = set(known)
    subset = frozenset(members)
    unknown = sorted(subset - known_set)
    if unknown:
        raise InvalidArgumentError(f"Unknown location ids: {unknown}", unknown=unknown)
    return subset


def check_order(known: Sequence[str], sigma: Iterable[str]) -> SearchOrder:
    """Validate that sigma is a permutation of the known ids."""
    order = tuple(sigma)
    if len(order) != len(known) or set(order) != set(known) or len(set(order)) != len(order):
        raise InvalidArgumentError(
            f"Search order {list(order)} is not a permutation of {list(known)}"
        )
    return order


def check_hider_set(instance: Instance, members: Iterable[str]) -> HiderSet:
    hider = check_subset(instance.ids, members)
    if len(hider) != instance.k:
        raise InvalidArgumentError(
            f"Hider set {sorted(hider)} has {len(hider)} members, expected k = {instance.k}"
        )
    return hider


def survival(instance: Instance, members: Iterable[str]) -> Fraction:
    """Probability of not being captured while searching every location in ``members``."""
    subset = check_subset(instance.ids, members)
    probabilities = instance.probabilities
    return math.prod((probabilities[i] for i in subset), start=Fraction(1))


def prefix_payoff(reward: RewardFunction, hider: HiderSet, sigma: Sequence[str]) -> Fraction:
    """Reward of the shortest prefix of ``sigma`` that contains every hidden target."""
    remaining = set(hider)
    searched: list[str] = []
    for location in sigma:
        searched.append(location)
        remaining.discard(location)
        if not remaining:
            return reward(frozenset(searched))
    raise InvalidArgumentError(f"Order {list(sigma)} never covers hider set {sorted(hider)}")


def payoff(instance: Instance, hider: Iterable[str], sigma: Sequence[str]) -> Fraction:
    """P(H, sigma) for the rescue game."""
    hider_set = check_hider_set(instance, hider)
    order = check_order(instance.ids, sigma)
    return prefix_payoff(lambda subset: survival(instance, subset), hider_set, order)


@dataclass(frozen=True)
class HiderMix:
    """Probability distribution over hider sets."""

    support: tuple[tuple[HiderSet, Fraction], ...]

    def __post_init__(self) -> None:
        sets = [hider for hider, _ in self.support]
        if len(set(sets)) != len(sets):
            raise InvalidArgumentError("Hider mix lists the same hider set twice")
        if any(weight <= 0 for _, weight in self.support):
            raise InvalidArgumentError("Hider mix weights must be positive")
        total = sum((weight for _, weight in self.support), Fraction(0))
        if total != 1:
            raise InvalidArgumentError(
                f"Hider mix weights sum to {format_rational(total)}, expected 1"
            )

    @classmethod
    def point(cls, hider: Iterable[str]) -> HiderMix:
        return cls(((frozenset(hider), Fraction(1)),))

    @classmethod
    def from_weights(cls, weights: Mapping[HiderSet, Fraction]) -> HiderMix:
        """Zero weights are dropped (mixed strategies may leave sets out)."""
        return cls(tuple((frozenset(h), Fraction(w)) for h, w in weights.items() if w != 0))

    def weight(self, hider: Iterable[str]) -> Fraction:
        target = frozenset(hider)
        return next((w for h, w in self.support if h == target), Fraction(0))

    def location_marginals(self) -> dict[str, Fraction]:
        """For k = 1 this is the hider vector x over locations."""
        marginals: dict[str, Fraction] = {}
        for hider, weight in self.support:
            for location in hider:
                marginals[location] = marginals.get(location, Fraction(0)) + weight
        return marginals


@dataclass(frozen=True)
class SearcherMix:
    """Distribution over full orderings, or over first blocks A in s_A form."""

    form: Literal["orders", "s_a"]
    support: tuple[tuple[Any, Fraction], ...]

    def __post_init__(self) -> None:
        if self.form not in ("orders", "s_a"):
            raise InvalidArgumentError(f"Unknown searcher mix form {self.form!r}")
        if any(weight <= 0 for _, weight in self.support):
            raise InvalidArgumentError("Searcher mix weights must be positive")
        total = sum((weight for _, weight in self.support), Fraction(0))
        if total != 1:
            raise InvalidArgumentError(
                f"Searcher mix weights sum to {format_rational(total)}, expected 1"
            )

    @classmethod
    def point(cls, sigma: Sequence[str]) -> SearcherMix:
        return cls("orders", ((tuple(sigma), Fraction(1)),))

    @classmethod
    def from_orders(cls, weights: Mapping[SearchOrder, Fraction]) -> SearcherMix:
        return cls("orders", tuple((tuple(o), Fraction(w)) for o, w in weights.items() if w))

    @classmethod
    def s_a(cls, weights: Mapping[HiderSet, Fraction]) -> SearcherMix:
        return cls("s_a", tuple((frozenset(a), Fraction(w)) for a, w in weights.items() if w))


def ordered_block(block: Iterable[str], ids: Sequence[str]) -> SearchOrder:
    """Members of ``block`` in canonical (location list) order."""
    members = set(block)
    return tuple(i for i in ids if i in members)


def enumerate_s_a_orders(ids: Sequence[str], block: Iterable[str]) -> Iterator[SearchOrder]:
    """All (n-k)! equally likely orderings of the s_A strategy."""
    head = ordered_block(block, ids)
    rest = [i for i in ids if i not in set(head)]
    for tail in itertools.permutations(rest):
        yield head + tail


def sample_s_a_order(ids: Sequence[str], searcher_mix: SearcherMix, rng: random.Random) -> SearchOrder:
    """Draw A by its weight, search it first, then the complement in shuffled order."""
    if searcher_mix.form != "s_a":
        raise InvalidArgumentError("Sampling needs a searcher mix in s_A form")
    draw = Fraction(rng.random())
    cumulative = Fraction(0)
    block = searcher_mix.support[-1][0]
    for candidate, weight in searcher_mix.support:
        cumulative += weight
        if draw < cumulative:
            block = candidate
            break
    head = ordered_block(block, ids)
    rest = [i for i in ids if i not in block]
    rng.shuffle(rest)
    return head + tuple(rest)


def s_a_expected_payoff(
    reward: RewardFunction, ids: Sequence[str], hider: HiderSet, block: Iterable[str]
) -> Fraction:
    """
    Exact expected payoff of s_A against hider set H.

    After A, the complement C is searched in uniform random order. With R = H - A
    (r = |R|, m = |C|), the last target of R sits at complement position t with
    probability C(t-1, r-1) / C(m, r), and the other t - r complement locations
    searched by then form a uniform subset of C - R of that size.
    """
    head = ordered_block(block, ids)
    head_set = frozenset(head)
    missing = hider - head_set
    if not missing:
        return prefix_payoff(reward, hider, head)

    complement = [i for i in ids if i not in head_set]
    others = [i for i in complement if i not in missing]
    m, r = len(complement), len(missing)
    base = head_set | missing
    total_orders = math.comb(m, r)
    expected = Fraction(0)
    for t in range(r, m + 1):
        weight = Fraction(math.comb(t - 1, r - 1), total_orders)
        extras = list(itertools.combinations(others, t - r))
        mean_reward = sum(
            (reward(base | frozenset(extra)) for extra in extras), Fraction(0)
        ) / len(extras)
        expected += weight * mean_reward
    return expected


def expected_payoff_with(
    reward: RewardFunction, ids: Sequence[str], hider_mix: HiderMix, searcher_mix: SearcherMix
) -> Fraction:
    """Bilinear expectation of P over both mixes for an arbitrary reward function."""
    total = Fraction(0)
    for hider, hider_weight in hider_mix.support:
        for strategy, searcher_weight in searcher_mix.support:
            if searcher_mix.form == "s_a":
                value = s_a_expected_payoff(reward, ids, hider, strategy)
            else:
                value = prefix_payoff(reward, hider, strategy)
            total += hider_weight * searcher_weight * value
    return total


def expected_payoff(instance: Instance, hider_mix: HiderMix, searcher_mix: SearcherMix) -> Fraction:
    """P(h, s) for the rescue game; s_A strategies are expanded exactly."""
    require_valid(instance)
    for hider, _ in hider_mix.support:
        check_hider_set(instance, hider)
    for strategy, _ in searcher_mix.support:
        if searcher_mix.form == "s_a":
            check_hider_set(instance, strategy)
        else:
            check_order(instance.ids, strategy)
    return expected_payoff_with(
        lambda subset: survival(instance, subset), instance.ids, hider_mix, searcher_mix
    )
