"""
The general search game on a set function f, and its closed-form solution.

Families of reward functions are registered with ``register_family`` the way
report types are registered: the instance-file loader and the CLI look them up
by kind. A family is z-indexable when every pairwise marginal ratio
f_{A+j}(i) / f_{A+i}(j) equals z_i / z_j; ``check_indexability`` verifies that
exhaustively (up to a configurable n-cap) and ``solve_closed_form`` then builds
the equalizing hider mix q_A = prod(z_A) / T_k(S) and the matching s_A mix.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, ClassVar, Literal

from .config import get_caps
from .core import (
    HiderMix,
    HiderSet,
    Instance,
    SearcherMix,
    ValidationIssue,
    as_rational,
    check_subset,
    format_rational,
    prefix_payoff,
)
from .errors import (
    InvalidArgumentError,
    InvalidSpecError,
    NotIndexableError,
    UnsupportedError,
)
from .utils.logging_config import StructuredLogger

logger = StructuredLogger("rescue_games.indexable")

# Family registry
FAMILIES: dict[str, type[SetFunctionSpec]] = {}


def register_family(kind: str):
    """Decorator to register set-function families."""

    def decorator(cls):
        cls.kind = kind
        FAMILIES[kind] = cls
        return cls

    return decorator


def default_ids(n: int) -> tuple[str, ...]:
    return tuple(str(i + 1) for i in range(n))


class SetFunctionSpec(ABC):
    """A reward function f over subsets of the location ids."""

    kind: ClassVar[str]
    ids: tuple[str, ...]

    @abstractmethod
    def evaluate(self, subset: frozenset[str]) -> Fraction: ...

    def analytic_z(self) -> tuple[Fraction, ...] | None:
        """Closed-form index vector, or None when it must be derived from values."""
        return None

    def issues(self) -> list[ValidationIssue]:
        """Parameter-range problems; indexability itself is checked separately."""
        issues: list[ValidationIssue] = []
        if len(set(self.ids)) != len(self.ids):
            issues.append(
                ValidationIssue(
                    code="duplicate_id",
                    message="Location ids must be distinct",
                    remediation="Rename duplicated locations.",
                )
            )
        return issues

    def parameters(self) -> dict[str, Any]:
        """Family parameters other than ids (used when re-emitting instance files)."""
        return {}

    @property
    def n(self) -> int:
        return len(self.ids)

    def _check_lengths(self, values: Sequence[Any], name: str) -> None:
        if len(values) != len(self.ids):
            raise InvalidSpecError(
                f"{self.kind}: {len(values)} {name} given for {len(self.ids)} locations"
            )


def _probability_issues(ids: Sequence[str], probabilities: Sequence[Fraction]) -> list:
    return [
        ValidationIssue(
            code="probability_out_of_range",
            message=f"p[{i}] = {format_rational(p)} is outside (0, 1)",
            remediation="Survival probabilities must satisfy 0 < p < 1.",
            subject=i,
        )
        for i, p in zip(ids, probabilities, strict=True)
        if not 0 < p < 1
    ]


def _cost_issues(ids: Sequence[str], costs: Sequence[Fraction]) -> list:
    return [
        ValidationIssue(
            code="cost_not_positive",
            message=f"c[{i}] = {format_rational(c)} must be positive",
            remediation="Search costs must be strictly positive.",
            subject=i,
        )
        for i, c in zip(ids, costs, strict=True)
        if c <= 0
    ]


@register_family("rescue")
@dataclass(frozen=True)
class Rescue(SetFunctionSpec):
    """f(A) = product of p_i over A."""

    ids: tuple[str, ...]
    p: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        self._check_lengths(self.p, "probabilities")

    @classmethod
    def from_probabilities(cls, p: Sequence[Any], ids: Sequence[str] | None = None) -> Rescue:
        return cls(tuple(ids or default_ids(len(p))), tuple(as_rational(v) for v in p))

    @classmethod
    def from_instance(cls, instance: Instance) -> Rescue:
        return cls(instance.ids, tuple(loc.p for loc in instance.locations))

    @cached_property
    def effective_p(self) -> dict[str, Fraction]:
        return dict(zip(self.ids, self.p, strict=True))

    def evaluate(self, subset: frozenset[str]) -> Fraction:
        probabilities = self.effective_p
        return math.prod((probabilities[i] for i in subset), start=Fraction(1))

    def analytic_z(self) -> tuple[Fraction, ...]:
        return tuple((1 - p) / p for p in self.p)

    def issues(self) -> list[ValidationIssue]:
        return super().issues() + _probability_issues(self.ids, self.p)

    def parameters(self) -> dict[str, Any]:
        return {"p": list(self.p)}


@register_family("discounted")
@dataclass(frozen=True)
class DiscountedRescue(SetFunctionSpec):
    """Rescue with every probability scaled by a discount gamma in (0, 1]."""

    ids: tuple[str, ...]
    p: tuple[Fraction, ...]
    gamma: Fraction

    def __post_init__(self) -> None:
        self._check_lengths(self.p, "probabilities")

    @classmethod
    def from_probabilities(
        cls, p: Sequence[Any], gamma: Any, ids: Sequence[str] | None = None
    ) -> DiscountedRescue:
        return cls(
            tuple(ids or default_ids(len(p))),
            tuple(as_rational(v) for v in p),
            as_rational(gamma),
        )

    @cached_property
    def effective_p(self) -> dict[str, Fraction]:
        return {i: self.gamma * p for i, p in zip(self.ids, self.p, strict=True)}

    def evaluate(self, subset: frozenset[str]) -> Fraction:
        probabilities = self.effective_p
        return math.prod((probabilities[i] for i in subset), start=Fraction(1))

    def analytic_z(self) -> tuple[Fraction, ...]:
        return tuple((1 - self.gamma * p) / p for p in self.p)

    def issues(self) -> list[ValidationIssue]:
        issues = super().issues() + _probability_issues(self.ids, self.p)
        if not 0 < self.gamma <= 1:
            issues.append(
                ValidationIssue(
                    code="gamma_out_of_range",
                    message=f"gamma = {format_rational(self.gamma)} is outside (0, 1]",
                    remediation="Use a discount factor 0 < gamma <= 1.",
                )
            )
        return issues

    def parameters(self) -> dict[str, Any]:
        return {"p": list(self.p), "gamma": self.gamma}


@register_family("additive")
@dataclass(frozen=True)
class AdditiveCost(SetFunctionSpec):
    """f(A) = total cost of the locations not yet searched."""

    ids: tuple[str, ...]
    costs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        self._check_lengths(self.costs, "costs")

    @classmethod
    def from_costs(cls, costs: Sequence[Any], ids: Sequence[str] | None = None) -> AdditiveCost:
        return cls(tuple(ids or default_ids(len(costs))), tuple(as_rational(c) for c in costs))

    @cached_property
    def cost(self) -> dict[str, Fraction]:
        return dict(zip(self.ids, self.costs, strict=True))

    def evaluate(self, subset: frozenset[str]) -> Fraction:
        return sum((c for i, c in self.cost.items() if i not in subset), Fraction(0))

    def analytic_z(self) -> tuple[Fraction, ...]:
        return self.costs

    def issues(self) -> list[ValidationIssue]:
        return super().issues() + _cost_issues(self.ids, self.costs)

    def parameters(self) -> dict[str, Any]:
        return {"costs": list(self.costs)}


@register_family("travel-search")
@dataclass(frozen=True)
class TravelSearch(SetFunctionSpec):
    """Complete-graph travel plus search costs: f(A) = |S - A| + cost of S - A."""

    ids: tuple[str, ...]
    costs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        self._check_lengths(self.costs, "costs")

    @classmethod
    def from_costs(cls, costs: Sequence[Any], ids: Sequence[str] | None = None) -> TravelSearch:
        return cls(tuple(ids or default_ids(len(costs))), tuple(as_rational(c) for c in costs))

    @cached_property
    def cost(self) -> dict[str, Fraction]:
        return dict(zip(self.ids, self.costs, strict=True))

    def evaluate(self, subset: frozenset[str]) -> Fraction:
        unsearched = [c for i, c in self.cost.items() if i not in subset]
        return len(unsearched) + sum(unsearched, Fraction(0))

    def analytic_z(self) -> tuple[Fraction, ...]:
        return tuple(1 + c for c in self.costs)

    def as_additive(self) -> AdditiveCost:
        """The equivalent additive game with every cost raised by one."""
        return AdditiveCost(self.ids, tuple(1 + c for c in self.costs))

    def issues(self) -> list[ValidationIssue]:
        return super().issues() + _cost_issues(self.ids, self.costs)

    def parameters(self) -> dict[str, Any]:
        return {"costs": list(self.costs)}


@register_family("table")
@dataclass(frozen=True)
class ExplicitTable(SetFunctionSpec):
    """f given by value for every subset."""

    ids: tuple[str, ...]
    table: Mapping[frozenset[str], Fraction] = field(hash=False)

    @classmethod
    def from_entries(
        cls, entries: Iterable[tuple[Iterable[str], Any]], ids: Sequence[str]
    ) -> ExplicitTable:
        table: dict[frozenset[str], Fraction] = {}
        for members, value in entries:
            subset = frozenset(members)
            if subset in table:
                raise InvalidSpecError(
                    f"Table lists subset {sorted(subset)} more than once", subset=sorted(subset)
                )
            table[subset] = as_rational(value)
        return cls(tuple(ids), table)

    def evaluate(self, subset: frozenset[str]) -> Fraction:
        try:
            return self.table[subset]
        except KeyError:
            raise InvalidSpecError(
                f"Table has no value for subset {sorted(subset)}", subset=sorted(subset)
            ) from None

    def issues(self) -> list[ValidationIssue]:
        issues = super().issues()
        known = set(self.ids)
        missing = 2 ** len(self.ids) - len(
            [s for s in self.table if s <= known]
        )
        if missing:
            issues.append(
                ValidationIssue(
                    code="table_incomplete",
                    message=f"Table is missing {missing} of {2 ** len(self.ids)} subsets",
                    remediation="Provide a value for every subset of the locations.",
                )
            )
        stray = [sorted(s) for s in self.table if not s <= known]
        if stray:
            issues.append(
                ValidationIssue(
                    code="table_unknown_ids",
                    message=f"Table rows reference unknown locations: {stray}",
                    remediation="Only use declared location ids in table sets.",
                )
            )
        return issues

    def parameters(self) -> dict[str, Any]:
        return {"table": dict(self.table)}


def build_spec(kind: str, ids: Sequence[str], **parameters: Any) -> SetFunctionSpec:
    """Instantiate a registered family from its parameters."""
    if kind not in FAMILIES:
        raise InvalidArgumentError(
            f"Unknown set-function family: {kind}. Supported families: {list(FAMILIES)}"
        )
    return FAMILIES[kind](ids=tuple(ids), **parameters)


def require_valid_spec(spec: SetFunctionSpec) -> SetFunctionSpec:
    issues = spec.issues()
    if issues:
        raise InvalidSpecError(
            "Invalid set function: " + "; ".join(issue.message for issue in issues),
            issues=[issue.to_dict() for issue in issues],
        )
    return spec


def eval_f(spec: SetFunctionSpec, members: Iterable[str]) -> Fraction:
    return spec.evaluate(check_subset(spec.ids, members))


def marginal(spec: SetFunctionSpec, members: Iterable[str], location: str) -> Fraction:
    """f_A(i) = f(A + i) - f(A)."""
    subset = check_subset(spec.ids, members)
    check_subset(spec.ids, [location])
    if location in subset:
        raise InvalidArgumentError(f"Location {location!r} is already in A")
    return spec.evaluate(subset | {location}) - spec.evaluate(subset)


@dataclass(frozen=True)
class ZIndex:
    """Index vector, scaled so the first location has z = 1."""

    ids: tuple[str, ...]
    z: tuple[Fraction, ...]

    @classmethod
    def normalized(cls, ids: Sequence[str], raw: Sequence[Fraction]) -> ZIndex:
        if any(value <= 0 for value in raw):
            raise InvalidArgumentError("Index entries must be positive")
        scale = raw[0]
        return cls(tuple(ids), tuple(Fraction(value) / scale for value in raw))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.ids, self.z, strict=True))

    def __getitem__(self, location: str) -> Fraction:
        return self.as_dict()[location]


@dataclass(frozen=True)
class Witness:
    """Smallest violation found: kind plus the (A, i, j) triple involved."""

    kind: Literal["ratio", "not_decreasing", "not_positive"]
    subset: tuple[str, ...]
    i: str | None = None
    j: str | None = None
    observed: Fraction | None = None
    expected: Fraction | None = None

    def describe(self) -> str:
        subset = "{" + ", ".join(self.subset) + "}"
        if self.kind == "ratio":
            return (
                f"A={subset}, i={self.i}, j={self.j}: marginal ratio "
                f"{format_rational(self.observed)} != z_i/z_j = {format_rational(self.expected)}"
            )
        if self.kind == "not_decreasing":
            return f"A={subset}, i={self.i}: f(A+i) - f(A) = {format_rational(self.observed)} is not negative"
        return f"A={subset}: f(A) = {format_rational(self.observed)} is not positive"


@dataclass(frozen=True)
class IndexabilityReport:
    indexable: bool
    z: ZIndex | None
    witness: Witness | None
    checked: int
    exhaustive: bool
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["witness"] = self.witness.describe() if self.witness else None
        return data


def _subset_values(spec: SetFunctionSpec) -> list[Fraction]:
    """f on every subset, indexed by bitmask over spec.ids."""
    ids = spec.ids
    return [
        spec.evaluate(frozenset(ids[b] for b in range(len(ids)) if mask >> b & 1))
        for mask in range(1 << len(ids))
    ]


def _members(ids: Sequence[str], mask: int) -> tuple[str, ...]:
    return tuple(ids[b] for b in range(len(ids)) if mask >> b & 1)


def check_indexability(spec: SetFunctionSpec, cap: int | None = None) -> IndexabilityReport:
    """
    Recover z and verify the marginal-ratio identity for every pair i != j and every
    A avoiding both. Violations are scanned in (i, j, A-bitmask) order, so the
    reported witness is the lexicographically least one.
    """
    require_valid_spec(spec)
    ids = spec.ids
    n = len(ids)
    if n < 2:
        raise InvalidArgumentError("Indexability needs at least two locations")
    cap = cap if cap is not None else get_caps().indexability_n
    analytic = spec.analytic_z()

    if n > cap:
        if analytic is None:
            report = IndexabilityReport(
                False, None, None, 0, False, f"n = {n} exceeds verification cap {cap}"
            )
        else:
            report = IndexabilityReport(
                True, ZIndex.normalized(ids, analytic), None, 0, False, "trusted analytically"
            )
        logger.log_event("indexability_checked", kind=spec.kind, n=n, **report.to_dict())
        return report

    values = _subset_values(spec)
    full = (1 << n) - 1
    checked = 0

    def rejected(witness: Witness, reason: str) -> IndexabilityReport:
        report = IndexabilityReport(False, None, witness, checked, True, reason)
        logger.log_event(
            "indexability_checked", kind=spec.kind, n=n, indexable=False, witness=witness.describe()
        )
        return report

    if spec.kind == "table":
        for mask in range(1 << n):
            checked += 1
            if values[mask] <= 0:
                return rejected(
                    Witness("not_positive", _members(ids, mask), observed=values[mask]),
                    "f must be positive",
                )

    for mask in range(1 << n):
        for b in range(n):
            if mask >> b & 1:
                continue
            checked += 1
            step = values[mask | 1 << b] - values[mask]
            if step >= 0:
                return rejected(
                    Witness("not_decreasing", _members(ids, mask), i=ids[b], observed=step),
                    "f must be strictly decreasing",
                )

    if analytic is None:
        # z_1 = 1 and z_j from the empty-set ratio f_{j}(1) / f_{1}(j) = z_1 / z_j
        raw = [Fraction(1)]
        for b in range(1, n):
            raw.append((values[1 | 1 << b] - values[1]) / (values[1 | 1 << b] - values[1 << b]))
    else:
        raw = list(analytic)
    if any(value <= 0 for value in raw):
        return rejected(
            Witness("not_decreasing", (), observed=min(raw)), "index entries must be positive"
        )
    z = ZIndex.normalized(ids, raw)

    for a in range(n):
        for b in range(a + 1, n):
            pair = 1 << a | 1 << b
            expected = z.z[a] / z.z[b]
            rest = full & ~pair
            sub = 0
            # ascending enumeration of the subsets of ``rest``
            while True:
                checked += 1
                with_both = values[sub | pair]
                observed = (with_both - values[sub | 1 << b]) / (with_both - values[sub | 1 << a])
                if observed != expected:
                    return rejected(
                        Witness(
                            "ratio", _members(ids, sub), ids[a], ids[b], observed, expected
                        ),
                        "marginal ratios do not factor as z_i / z_j",
                    )
                if sub == rest:
                    break
                sub = (sub - rest) & rest

    report = IndexabilityReport(True, z, None, checked, True)
    logger.log_event(
        "indexability_checked", kind=spec.kind, n=n, indexable=True, checked=checked
    )
    return report


def recover_z(spec: SetFunctionSpec, cap: int | None = None) -> ZIndex:
    report = check_indexability(spec, cap)
    if not report.indexable or report.z is None:
        detail = report.witness.describe() if report.witness else report.reason
        raise NotIndexableError(
            f"Set function is not z-indexable ({detail}); use the oracle instead",
            report=report,
            witness=detail,
        )
    return report.z


def t_poly(z: ZIndex | Mapping[str, Fraction], members: Iterable[str], k: int) -> Fraction:
    """Elementary symmetric polynomial of degree k in the z-values of ``members``."""
    index = z.as_dict() if isinstance(z, ZIndex) else dict(z)
    values = [index[i] for i in check_subset(index, members)]
    if k < 0 or k > len(values):
        raise InvalidArgumentError(f"T_k needs 0 <= k <= |A| = {len(values)}, got k = {k}")
    partial = [Fraction(1)] + [Fraction(0)] * k
    for count, value in enumerate(values, start=1):
        for degree in range(min(count, k), 0, -1):
            partial[degree] += value * partial[degree - 1]
    return partial[k]


@dataclass(frozen=True)
class SetFunctionGame:
    """The game on f with k targets; rescue instances map onto it through ``Rescue``."""

    spec: SetFunctionSpec
    k: int

    @property
    def ids(self) -> tuple[str, ...]:
        return self.spec.ids

    def issues(self) -> list[ValidationIssue]:
        issues = self.spec.issues()
        if not 1 <= self.k <= self.spec.n - 1:
            issues.append(
                ValidationIssue(
                    code="k_out_of_range",
                    message=f"k = {self.k} must satisfy 1 <= k <= n - 1 = {self.spec.n - 1}",
                    remediation="Hide at least one and at most n - 1 targets.",
                )
            )
        return issues

    def payoff(self, hider: HiderSet, sigma: Sequence[str]) -> Fraction:
        return prefix_payoff(self.spec.evaluate, hider, sigma)


def to_game(target: Instance | SetFunctionGame) -> SetFunctionGame:
    if isinstance(target, SetFunctionGame):
        return target
    if isinstance(target, Instance):
        return SetFunctionGame(Rescue.from_instance(target), target.k)
    raise InvalidArgumentError(f"Expected an Instance or SetFunctionGame, got {type(target).__name__}")


def require_valid_game(game: SetFunctionGame) -> SetFunctionGame:
    issues = game.issues()
    if issues:
        raise InvalidArgumentError(
            "Invalid game: " + "; ".join(issue.message for issue in issues),
            issues=[issue.to_dict() for issue in issues],
        )
    return game


@dataclass(frozen=True)
class GameSolution:
    value: Fraction
    hider: HiderMix
    searcher: SearcherMix
    provenance: Literal["closed-form", "oracle"]
    k: int
    z: ZIndex | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": format_rational(self.value),
            "k": self.k,
            "provenance": self.provenance,
            "z": {i: format_rational(v) for i, v in self.z.as_dict().items()} if self.z else None,
            "hider": [
                {"set": sorted(h), "weight": format_rational(w)} for h, w in self.hider.support
            ],
            "searcher": [
                {"first": sorted(a), "weight": format_rational(w)} for a, w in self.searcher.support
            ],
        }


def solve_closed_form(spec: SetFunctionSpec, k: int) -> GameSolution:
    """Equalizing hider mix q_A, the matching s_A searcher mix, and the exact value."""
    game = require_valid_game(SetFunctionGame(spec, k))
    z = recover_z(spec)
    ids = spec.ids
    index = z.as_dict()
    normalizer = t_poly(z, ids, k)
    weights = {
        frozenset(block): math.prod((index[i] for i in block), start=Fraction(1)) / normalizer
        for block in itertools.combinations(ids, k)
    }
    hider = HiderMix.from_weights(weights)
    searcher = SearcherMix.s_a(weights)
    # every ordering gives the same payoff against q; use the identity ordering
    value = sum((w * game.payoff(h, ids) for h, w in weights.items()), Fraction(0))
    logger.log_event(
        "closed_form_solved", kind=spec.kind, n=len(ids), k=k, value=value
    )
    return GameSolution(value, hider, searcher, "closed-form", k, z)


def solve_game(target: Instance | SetFunctionGame) -> GameSolution:
    game = to_game(target)
    return solve_closed_form(game.spec, game.k)


def value_k1(spec: SetFunctionSpec) -> Fraction:
    """lambda_1 * (1 - prod p) for the rescue game with one target."""
    if not isinstance(spec, (Rescue, DiscountedRescue)):
        raise UnsupportedError(f"The k = 1 value formula covers rescue games, not {spec.kind!r}")
    require_valid_game(SetFunctionGame(spec, 1))
    probabilities = list(spec.effective_p.values())
    inverse_lambda = sum(((1 - p) / p for p in probabilities), Fraction(0))
    return (1 - math.prod(probabilities, start=Fraction(1))) / inverse_lambda


def cost_paid_view(spec: SetFunctionSpec, value: Fraction) -> Fraction:
    """Expected total cost paid, f(empty) - value; a display transform only."""
    if not isinstance(spec, (AdditiveCost, TravelSearch)):
        raise UnsupportedError(f"Cost view applies to cost families, not {spec.kind!r}")
    return spec.evaluate(frozenset()) - value
