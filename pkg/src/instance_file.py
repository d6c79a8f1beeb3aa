"""
Instance files: JSON documents with a "kind" tag.

Rationals are strings such as "3/5" or "1"; JSON numbers and decimal literals
are rejected so nothing is rounded on the way in.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, Strict, StringConstraints, TypeAdapter
from pydantic import ValidationError

from .core import Instance, as_rational, format_rational, require_valid
from .errors import InvalidArgumentError
from .indexable import (
    AdditiveCost,
    DiscountedRescue,
    ExplicitTable,
    Rescue,
    SetFunctionGame,
    TravelSearch,
    require_valid_game,
)
from .tree import RootedTree, require_valid_tree

RationalText = Annotated[str, Strict(), StringConstraints(pattern=r"^-?\d+(/\d+)?$")]
LocationId = Annotated[str, Strict(), StringConstraints(min_length=1)]
TargetCount = Annotated[int, Strict()]


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ProbabilityEntry(_Document):
    id: LocationId = Field(description="Location or vertex id")
    p: RationalText = Field(description="Survival probability, e.g. '2/3'")


class LocationEntry(_Document):
    id: LocationId = Field(description="Location id")


class TableRow(_Document):
    members: list[LocationId] = Field(alias="set", description="Subset of location ids")
    value: RationalText = Field(description="f(set)")


class RescueDocument(_Document):
    kind: Literal["rescue"]
    k: TargetCount = Field(description="Number of hidden targets")
    locations: list[ProbabilityEntry] = Field(min_length=1)


class DiscountedDocument(_Document):
    kind: Literal["discounted"]
    k: TargetCount
    gamma: RationalText = Field(description="Discount factor in (0, 1]")
    locations: list[ProbabilityEntry] = Field(min_length=1)


class AdditiveDocument(_Document):
    kind: Literal["additive"]
    k: TargetCount
    locations: list[LocationEntry] = Field(min_length=1)
    costs: list[RationalText] = Field(description="Search cost per location, same order")


class TravelSearchDocument(_Document):
    kind: Literal["travel-search"]
    k: TargetCount
    locations: list[LocationEntry] = Field(min_length=1)
    costs: list[RationalText] = Field(description="Search cost per location, same order")


class TableDocument(_Document):
    kind: Literal["table"]
    k: TargetCount
    locations: list[LocationEntry] = Field(min_length=1)
    table: list[TableRow] = Field(description="Value of f for every subset")


class TreeDocument(_Document):
    kind: Literal["tree"]
    root: LocationId
    vertices: list[ProbabilityEntry] = Field(min_length=1)
    edges: list[tuple[LocationId, LocationId]] = Field(default_factory=list)


class HiderDocument(_Document):
    hider: dict[str, RationalText] = Field(description="Location id -> probability")


InstanceDocument = Annotated[
    Union[
        RescueDocument,
        DiscountedDocument,
        AdditiveDocument,
        TravelSearchDocument,
        TableDocument,
        TreeDocument,
    ],
    Field(discriminator="kind"),
]
_INSTANCE_ADAPTER: TypeAdapter[Any] = TypeAdapter(InstanceDocument)

Loaded = Instance | SetFunctionGame | RootedTree


def _describe(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(piece) for piece in error["loc"])
        parts.append(f"{location}: {error['msg']}" if location else error["msg"])
    return "; ".join(parts)


def _read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise InvalidArgumentError(f"No such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from exc


def parse_document(data: Any) -> Any:
    """Validate a decoded JSON document against the schema for its kind."""
    try:
        return _INSTANCE_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise InvalidArgumentError(f"Malformed instance file: {_describe(exc)}") from exc


def build(document: Any) -> Loaded:
    """Turn a parsed document into a validated Instance, SetFunctionGame or RootedTree."""
    if isinstance(document, TreeDocument):
        tree = RootedTree.build(
            [(v.id, v.p) for v in document.vertices], document.edges, document.root
        )
        return require_valid_tree(tree)
    if isinstance(document, RescueDocument):
        instance = Instance.from_probabilities({loc.id: loc.p for loc in document.locations}, document.k)
        if len(instance.locations) != len(document.locations):
            raise InvalidArgumentError("Location ids must be distinct")
        return require_valid(instance)

    ids = [loc.id for loc in document.locations]
    if isinstance(document, DiscountedDocument):
        spec: Any = DiscountedRescue.from_probabilities(
            [loc.p for loc in document.locations], document.gamma, ids
        )
    elif isinstance(document, AdditiveDocument):
        spec = AdditiveCost.from_costs(document.costs, ids)
    elif isinstance(document, TravelSearchDocument):
        spec = TravelSearch.from_costs(document.costs, ids)
    elif isinstance(document, TableDocument):
        spec = ExplicitTable.from_entries(((row.members, row.value) for row in document.table), ids)
    else:
        raise InvalidArgumentError(f"Unsupported document type {type(document).__name__}")
    return require_valid_game(SetFunctionGame(spec, document.k))


def load_document(path: str | Path) -> Any:
    return parse_document(_read_json(path))


def load_instance(path: str | Path) -> Loaded:
    return build(load_document(path))


def load_hider(path: str | Path) -> dict[str, Any]:
    """Read {"hider": {id: "num/den"}}; weights are returned as Fractions."""
    try:
        document = HiderDocument.model_validate(_read_json(path))
    except ValidationError as exc:
        raise InvalidArgumentError(f"Malformed hider file: {_describe(exc)}") from exc
    return {i: as_rational(w) for i, w in document.hider.items()}


def _rationals(values: Any) -> list[str]:
    return [format_rational(v) for v in values]


def dump_document(target: Loaded) -> dict[str, Any]:
    """Re-emit an instance in file format; ``build(parse_document(...))`` gives it back."""
    if isinstance(target, RootedTree):
        return {
            "kind": "tree",
            "root": target.root,
            "vertices": [{"id": v.id, "p": format_rational(v.p)} for v in target.vertices],
            "edges": [[a, b] for a, b in target.edges],
        }
    if isinstance(target, Instance):
        return {
            "kind": "rescue",
            "k": target.k,
            "locations": [{"id": loc.id, "p": format_rational(loc.p)} for loc in target.locations],
        }

    spec, k = target.spec, target.k
    if isinstance(spec, Rescue):
        return dump_document(Instance.from_probabilities(dict(zip(spec.ids, spec.p)), k))
    document: dict[str, Any] = {"kind": spec.kind, "k": k}
    if isinstance(spec, DiscountedRescue):
        document["gamma"] = format_rational(spec.gamma)
        document["locations"] = [
            {"id": i, "p": format_rational(p)} for i, p in zip(spec.ids, spec.p)
        ]
        return document
    document["locations"] = [{"id": i} for i in spec.ids]
    if isinstance(spec, (AdditiveCost, TravelSearch)):
        document["costs"] = _rationals(spec.costs)
    elif isinstance(spec, ExplicitTable):
        position = {i: pos for pos, i in enumerate(spec.ids)}
        rows = sorted(
            spec.table.items(),
            key=lambda item: (len(item[0]), sorted(position[i] for i in item[0])),
        )
        document["table"] = [
            {"set": sorted(members, key=position.__getitem__), "value": format_rational(value)}
            for members, value in rows
        ]
    return document
