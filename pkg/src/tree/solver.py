"""
Optimal strategies for the single-target game on a tree.

The hider strategy and value are built bottom-up over the degree-3 normalized
tree. At a branch vertex with branches G1, G2 (G1 rooted at the smaller id):

    lambda = 1 / ((1 - pi(G1)) / V1 + (1 - pi(G2)) / V2)
    h(G_i) = lambda * (1 - pi(G_i)) / V_i
    V      = p_v * lambda * (1 - pi(G1) * pi(G2))
    q_G1   = lambda * (1 / V1 - pi(G2) / V2)

and the searcher picks G1 first with probability q_G1, independently at every
branch vertex.
"""

from __future__ import annotations

import random
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..config import get_caps
from ..core import SearchOrder, format_rational
from ..errors import InvalidArgumentError, ResourceLimitError
from .model import RootedTree, logger, normalize_degree3, pi, require_valid_tree


@dataclass(frozen=True)
class TreeSolution:
    value: Fraction
    hider: dict[str, Fraction]
    branch_choice: dict[str, Fraction]
    lambdas: dict[str, Fraction]
    subtree_values: dict[str, Fraction]
    search_tree: RootedTree
    vertex_map: dict[str, str | None]

    def first_branch(self, vertex: str) -> str:
        return self.search_tree.children[vertex][0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": format_rational(self.value),
            "hider": {v: format_rational(w) for v, w in sorted(self.hider.items())},
            "branch_choice": {
                v: {"first": self.first_branch(v), "q": format_rational(q)}
                for v, q in sorted(self.branch_choice.items())
            },
            "lambdas": {v: format_rational(lam) for v, lam in sorted(self.lambdas.items())},
        }


def solve_tree(tree: RootedTree) -> TreeSolution:
    """Recursive hider distribution, value and branch choices; normalizes first."""
    search_tree, vertex_map = normalize_degree3(require_valid_tree(tree))
    p = search_tree.p
    subtree_pi = {v: pi(search_tree, members) for v, members in search_tree.subtrees.items()}
    values: dict[str, Fraction] = {}
    hiders: dict[str, dict[str, Fraction]] = {}
    lambdas: dict[str, Fraction] = {}
    branch_choice: dict[str, Fraction] = {}

    for v in reversed(search_tree.bfs_order):
        kids = search_tree.children[v]
        if not kids:
            values[v] = p[v]
            hiders[v] = {v: Fraction(1)}
        elif len(kids) == 1:
            values[v] = p[v] * values[kids[0]]
            hiders[v] = hiders.pop(kids[0])
        else:
            g1, g2 = kids
            v1, v2 = values[g1], values[g2]
            pi1, pi2 = subtree_pi[g1], subtree_pi[g2]
            lam = 1 / ((1 - pi1) / v1 + (1 - pi2) / v2)
            lambdas[v] = lam
            branch_choice[v] = lam * (1 / v1 - pi2 / v2)
            values[v] = p[v] * lam * (1 - pi1 * pi2)
            merged: dict[str, Fraction] = {}
            for g, vg, pig in ((g1, v1, pi1), (g2, v2, pi2)):
                mass = lam * (1 - pig) / vg
                for leaf, weight in hiders.pop(g).items():
                    merged[leaf] = mass * weight
            hiders[v] = merged

    root = search_tree.root
    solution = TreeSolution(
        value=values[root],
        hider={vertex_map[v] or v: w for v, w in hiders[root].items() if w},
        branch_choice=branch_choice,
        lambdas=lambdas,
        subtree_values=values,
        search_tree=search_tree,
        vertex_map=vertex_map,
    )
    logger.log_event(
        "tree_solved",
        vertices=tree.n,
        branch_vertices=len(branch_choice),
        value=solution.value,
    )
    return solution


def _first_probability(solution: TreeSolution, vertex: str, child: str) -> Fraction:
    q = solution.branch_choice[vertex]
    return q if solution.first_branch(vertex) == child else 1 - q


def _project(solution: TreeSolution, sequence: SearchOrder) -> SearchOrder:
    """Drop inserted vertices so the search lives on the original tree."""
    return tuple(v for v in sequence if solution.vertex_map.get(v) is not None)


def sample_search(
    tree: RootedTree,
    solution: TreeSolution,
    seed: int | None = None,
    rng: random.Random | None = None,
) -> SearchOrder:
    """
    One depth-first search drawn by independent branch choices; deterministic
    given seed. Pass ``rng`` to draw several searches from one stream.
    """
    covered = {v for v in solution.vertex_map.values() if v is not None}
    if covered != set(tree.ids):
        raise InvalidArgumentError(
            "Solution was computed for a different tree",
            missing=sorted(set(tree.ids) - covered),
            extra=sorted(covered - set(tree.ids)),
        )
    rng = rng or random.Random(seed)
    search_tree = solution.search_tree
    sequence: list[str] = []
    stack = [search_tree.root]
    while stack:
        v = stack.pop()
        sequence.append(v)
        kids = list(search_tree.children[v])
        if len(kids) == 2 and not Fraction(rng.random()) < solution.branch_choice[v]:
            kids.reverse()
        stack.extend(reversed(kids))
    return _project(solution, tuple(sequence))


def searcher_guarantee(
    tree: RootedTree, solution: TreeSolution, target: str, allow_internal: bool = False
) -> Fraction:
    """
    Exact expected payoff of the branch-choice strategy against a hider at ``target``.

    Along the path to the target, each branch vertex contributes
    q_own + (1 - q_own) * pi(other branch): either the target's branch comes
    first, or the whole other branch is searched before it.
    """
    if target not in tree.p:
        raise InvalidArgumentError(f"Unknown vertex {target!r}")
    if target not in tree.leaves and not allow_internal:
        raise InvalidArgumentError(
            f"Vertex {target!r} is not a leaf; pass allow_internal to evaluate it anyway"
        )
    search_tree = solution.search_tree
    path = search_tree.path_to(target)
    guarantee = pi(search_tree, path)
    for v, child in zip(path, path[1:]):
        if not search_tree.is_branch_vertex(v):
            continue
        other = next(c for c in search_tree.children[v] if c != child)
        own = _first_probability(solution, v, child)
        guarantee *= own + (1 - own) * pi(search_tree, search_tree.subtrees[other])
    return guarantee


def _weighted_searches(
    solution: TreeSolution, vertex: str
) -> Iterator[tuple[SearchOrder, Fraction]]:
    search_tree = solution.search_tree
    kids = search_tree.children[vertex]
    if not kids:
        yield (vertex,), Fraction(1)
    elif len(kids) == 1:
        for tail, weight in _weighted_searches(solution, kids[0]):
            yield (vertex,) + tail, weight
    else:
        q = solution.branch_choice[vertex]
        for first, second, weight in ((kids[0], kids[1], q), (kids[1], kids[0], 1 - q)):
            if not weight:
                continue
            for head, w1 in _weighted_searches(solution, first):
                for tail, w2 in _weighted_searches(solution, second):
                    yield (vertex,) + head + tail, weight * w1 * w2


def searcher_mix(
    tree: RootedTree, solution: TreeSolution, cap: int | None = None
) -> dict[SearchOrder, Fraction]:
    """Exact distribution of the branch-choice strategy over depth-first searches of ``tree``."""
    cap = cap if cap is not None else get_caps().expanding_searches
    size = 2 ** len(solution.branch_choice)
    if size > cap:
        raise ResourceLimitError(
            f"Searcher mix has up to {size} depth-first searches, over the cap of {cap}",
            cap=cap,
            size=size,
        )
    mix: dict[SearchOrder, Fraction] = {}
    for sequence, weight in _weighted_searches(solution, solution.search_tree.root):
        order = _project(solution, sequence)
        mix[order] = mix.get(order, Fraction(0)) + weight
    return mix
