"""Expanding searches, subsearches and their payoffs on a rooted tree."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from ..config import get_caps
from ..core import SearchOrder
from ..errors import InvalidArgumentError, ResourceLimitError, UndefinedIndexError
from .model import RootedTree, logger, pi


@dataclass(frozen=True)
class Subsearch:
    """A contiguous block of some expanding search."""

    sequence: SearchOrder

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.sequence)


def check_expanding_search(tree: RootedTree, sequence: Sequence[str]) -> SearchOrder:
    """Starts at the root; every later vertex is adjacent to an earlier one."""
    order = tuple(sequence)
    if len(order) != tree.n or set(order) != set(tree.ids):
        raise InvalidArgumentError(f"Search {list(order)} is not a permutation of the vertices")
    if order[0] != tree.root:
        raise InvalidArgumentError(f"Expanding search must start at the root {tree.root!r}")
    seen = {order[0]}
    for v in order[1:]:
        if tree.parent[v] not in seen:
            raise InvalidArgumentError(f"Vertex {v!r} is searched before its parent")
        seen.add(v)
    return order


def validate_subsearch(tree: RootedTree, sequence: Sequence[str]) -> Subsearch:
    """
    A block is a subsearch when some ancestor-closed set disjoint from it can be
    searched first: every vertex either follows its parent inside the block or
    has no ancestor in the block at all.
    """
    block = tuple(sequence)
    members = set(block)
    if not block or len(members) != len(block):
        raise InvalidArgumentError("Subsearch must be a non-empty sequence of distinct vertices")
    unknown = sorted(members - set(tree.ids))
    if unknown:
        raise InvalidArgumentError(f"Unknown vertices in subsearch: {unknown}")
    seen: set[str] = set()
    for v in block:
        parent = tree.parent[v]
        if parent in members:
            if parent not in seen:
                raise InvalidArgumentError(f"Vertex {v!r} precedes its parent {parent!r}")
        elif any(a in members for a in tree.path_to(v)[:-1]):
            raise InvalidArgumentError(
                f"Vertex {v!r} is cut off from the block by an unsearched ancestor"
            )
        seen.add(v)
    return Subsearch(block)


def subsearch_payoff(tree: RootedTree, x: Mapping[str, Fraction], alpha: Subsearch) -> Fraction:
    """sum_i x_alpha(i) * p_alpha(1) ... p_alpha(i); vertices absent from x weigh 0."""
    total = Fraction(0)
    survival = Fraction(1)
    for v in alpha.sequence:
        survival *= tree.p[v]
        weight = x.get(v, 0)
        if weight:
            total += weight * survival
    return total


def subsearch_index(tree: RootedTree, x: Mapping[str, Fraction], alpha: Subsearch) -> Fraction:
    """I(alpha) = P(x, alpha) / (1 - pi(A))."""
    survival = pi(tree, alpha.vertex_set)
    if survival == 1:
        raise UndefinedIndexError(
            f"Index undefined: pi(A) = 1 for A = {sorted(alpha.vertex_set)}"
        )
    return subsearch_payoff(tree, x, alpha) / (1 - survival)


def search_payoff(tree: RootedTree, target: str, sequence: Sequence[str]) -> Fraction:
    """Payoff of an expanding search against a point hider: pi of the prefix up to target."""
    survival = Fraction(1)
    for v in sequence:
        survival *= tree.p[v]
        if v == target:
            return survival
    raise InvalidArgumentError(f"Target {target!r} is not in the search")


def count_expanding_searches(tree: RootedTree) -> int:
    """Linear extensions of the root-down order: n! / prod |G(v)|."""
    sizes = math.prod(len(members) for members in tree.subtrees.values())
    return math.factorial(tree.n) // sizes


def _extensions(
    frontier: list[str], children: Mapping[str, Sequence[str]], prefix: list[str]
) -> Iterator[SearchOrder]:
    if not frontier:
        yield tuple(prefix)
        return
    for pos, v in enumerate(frontier):
        prefix.append(v)
        next_frontier = sorted(frontier[:pos] + frontier[pos + 1 :] + list(children[v]))
        yield from _extensions(next_frontier, children, prefix)
        prefix.pop()


def enumerate_expanding_searches(tree: RootedTree, cap: int | None = None) -> list[SearchOrder]:
    """Every expanding search, in lexicographic order of the id sequences."""
    cap = cap if cap is not None else get_caps().expanding_searches
    count = count_expanding_searches(tree)
    if count > cap:
        raise ResourceLimitError(
            f"Tree has {count} expanding searches, over the cap of {cap}", cap=cap, size=count
        )
    searches = list(_extensions([tree.root], tree.children, []))
    logger.log_event(
        "expanding_searches_enumerated", level="DEBUG", vertices=tree.n, count=len(searches)
    )
    return searches


def _depth_first(tree: RootedTree, vertex: str) -> list[SearchOrder]:
    kids = tree.children[vertex]
    if not kids:
        return [(vertex,)]
    results: list[SearchOrder] = []
    below = {c: _depth_first(tree, c) for c in kids}
    for arrangement in itertools.permutations(kids):
        for parts in itertools.product(*(below[c] for c in arrangement)):
            results.append((vertex,) + tuple(itertools.chain.from_iterable(parts)))
    return results


def enumerate_depth_first_searches(tree: RootedTree) -> list[SearchOrder]:
    """Expanding searches that finish each subtree before leaving it."""
    return sorted(_depth_first(tree, tree.root))
