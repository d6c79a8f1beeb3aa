"""Rooted trees with survival probabilities on the vertices."""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

from ..core import ValidationIssue, as_rational, check_subset, format_rational
from ..errors import InvalidArgumentError
from ..utils.logging_config import StructuredLogger

logger = StructuredLogger("rescue_games.tree")

AUX_PREFIX = "aux-"


@dataclass(frozen=True)
class Vertex:
    id: str
    p: Fraction


@dataclass(frozen=True)
class RootedTree:
    """
    Vertices, undirected edges and a root O.

    The structural views (children, parent, subtrees) assume the tree passed
    ``validate_tree``; they are computed by a BFS from the root.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[str, str], ...]
    root: str

    @classmethod
    def build(
        cls,
        vertices: Mapping[str, Any] | Sequence[tuple[str, Any]],
        edges: Iterable[Sequence[str]],
        root: str,
    ) -> RootedTree:
        items = vertices.items() if isinstance(vertices, Mapping) else vertices
        return cls(
            tuple(Vertex(str(v), as_rational(p)) for v, p in items),
            tuple((str(a), str(b)) for a, b in edges),
            str(root),
        )

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @cached_property
    def p(self) -> dict[str, Fraction]:
        return {v.id: v.p for v in self.vertices}

    @cached_property
    def adjacency(self) -> dict[str, list[str]]:
        neighbors: dict[str, list[str]] = {v: [] for v in self.ids}
        for a, b in self.edges:
            neighbors.setdefault(a, []).append(b)
            neighbors.setdefault(b, []).append(a)
        return {v: sorted(ns) for v, ns in neighbors.items()}

    @cached_property
    def bfs_order(self) -> tuple[str, ...]:
        seen = {self.root}
        order = [self.root]
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in self.adjacency.get(v, []):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    queue.append(w)
        return tuple(order)

    @cached_property
    def parent(self) -> dict[str, str | None]:
        parents: dict[str, str | None] = {self.root: None}
        for v in self.bfs_order:
            for w in self.adjacency[v]:
                if w not in parents:
                    parents[w] = v
        return parents

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        """Neighbors away from the root, ascending by id."""
        kids: dict[str, list[str]] = {v: [] for v in self.bfs_order}
        for v in self.bfs_order:
            parent = self.parent[v]
            if parent is not None:
                kids[parent].append(v)
        return {v: tuple(sorted(ws)) for v, ws in kids.items()}

    @cached_property
    def subtrees(self) -> dict[str, frozenset[str]]:
        """Vertex set of G(v) for every v."""
        members: dict[str, frozenset[str]] = {}
        for v in reversed(self.bfs_order):
            members[v] = frozenset({v}).union(*(members[c] for c in self.children[v]))
        return members

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        return tuple(sorted(v for v in self.bfs_order if not self.children[v]))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def path_to(self, vertex: str) -> tuple[str, ...]:
        """Vertices from the root down to ``vertex`` inclusive."""
        path = [vertex]
        parent = self.parent[vertex]
        while parent is not None:
            path.append(parent)
            parent = self.parent[parent]
        return tuple(reversed(path))

    def is_branch_vertex(self, vertex: str) -> bool:
        return len(self.children[vertex]) == 2


def validate_tree(tree: RootedTree) -> list[ValidationIssue]:
    """Report every structural and probability-range violation."""
    issues: list[ValidationIssue] = []
    ids = tree.ids
    known = set(ids)

    def issue(code: str, message: str, remediation: str, subject: str | None = None) -> None:
        issues.append(ValidationIssue(code, message, "critical", remediation, subject))

    if len(known) != len(ids):
        duplicates = sorted({v for v in ids if ids.count(v) > 1})
        issue("duplicate_id", f"Vertex ids repeated: {duplicates}", "Give every vertex a distinct id.")
    if tree.root not in known:
        issue("root_missing", f"Root {tree.root!r} is not a vertex", "Name an existing vertex as root.")

    # union-find over the edge list catches cycles and duplicate edges
    component = {v: v for v in known}

    def find(v: str) -> str:
        while component[v] != v:
            component[v] = component[component[v]]
            v = component[v]
        return v

    structural_ok = tree.root in known
    for a, b in tree.edges:
        if a not in known or b not in known:
            issue(
                "unknown_edge_vertex",
                f"Edge ({a}, {b}) references an unknown vertex",
                "Only connect declared vertices.",
            )
            structural_ok = False
            continue
        if a == b:
            issue("self_loop", f"Edge ({a}, {b}) is a loop", "Remove self-loops.", a)
            structural_ok = False
            continue
        ra, rb = find(a), find(b)
        if ra == rb:
            issue("cycle", f"Edge ({a}, {b}) closes a cycle", "A tree must be acyclic.")
            structural_ok = False
            continue
        component[ra] = rb

    roots = {find(v) for v in known}
    if len(roots) > 1:
        issue(
            "disconnected",
            f"Graph has {len(roots)} components",
            "Connect every vertex to the root.",
        )
        structural_ok = False

    for v in tree.vertices:
        if not 0 < v.p <= 1:
            issue(
                "probability_out_of_range",
                f"p[{v.id}] = {format_rational(v.p)} is outside (0, 1]",
                "Vertex survival probabilities must satisfy 0 < p <= 1.",
                v.id,
            )

    if structural_ok and not issues:
        for leaf in tree.leaves:
            if tree.p[leaf] == 1:
                issue(
                    "leaf_probability_one",
                    f"Leaf {leaf!r} has p = 1",
                    "A leaf with p = 1 is equivalent to removing it; drop the vertex.",
                    leaf,
                )
    return issues


def require_valid_tree(tree: RootedTree) -> RootedTree:
    issues = validate_tree(tree)
    if issues:
        raise InvalidArgumentError(
            "Invalid tree: " + "; ".join(issue.message for issue in issues),
            issues=[issue.to_dict() for issue in issues],
        )
    return tree


def pi(tree: RootedTree, members: Iterable[str]) -> Fraction:
    """Product of p over a vertex set; pi(empty) = 1."""
    probabilities = tree.p
    return math.prod(
        (probabilities[v] for v in check_subset(tree.ids, members)), start=Fraction(1)
    )


def _fresh_ids(taken: set[str]) -> Iterable[str]:
    counter = 1
    while True:
        candidate = f"{AUX_PREFIX}{counter}"
        counter += 1
        if candidate not in taken:
            yield candidate


def is_normalized(tree: RootedTree) -> bool:
    return all(len(kids) <= 2 for kids in tree.children.values())


def normalize_degree3(tree: RootedTree) -> tuple[RootedTree, dict[str, str | None]]:
    """
    Split every vertex with more than two children.

    The vertex keeps its first child (ascending id) and gains a fresh vertex X with
    p = 1 that adopts the remaining children; X is split again if it still has
    more than two. Returns the new tree and a map from its vertex ids to the
    original ids (None for inserted vertices).
    """
    require_valid_tree(tree)
    vertex_map: dict[str, str | None] = {v: v for v in tree.ids}
    if is_normalized(tree):
        return tree, vertex_map

    fresh = _fresh_ids(set(tree.ids))
    vertices = list(tree.vertices)
    edges: list[tuple[str, str]] = []
    for v in tree.bfs_order:
        holder, kids = v, list(tree.children[v])
        while len(kids) > 2:
            edges.append((holder, kids[0]))
            aux = next(fresh)
            vertices.append(Vertex(aux, Fraction(1)))
            vertex_map[aux] = None
            edges.append((holder, aux))
            holder, kids = aux, kids[1:]
        edges.extend((holder, kid) for kid in kids)

    normalized = RootedTree(tuple(vertices), tuple(edges), tree.root)
    logger.log_event(
        "tree_normalized",
        level="DEBUG",
        vertices=tree.n,
        inserted=normalized.n - tree.n,
    )
    return normalized, vertex_map
