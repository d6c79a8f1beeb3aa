"""Search-and-rescue game on rooted trees under expanding search (one target)."""

from .model import (
    RootedTree,
    Vertex,
    is_normalized,
    normalize_degree3,
    pi,
    require_valid_tree,
    validate_tree,
)
from .searches import (
    Subsearch,
    check_expanding_search,
    count_expanding_searches,
    enumerate_depth_first_searches,
    enumerate_expanding_searches,
    search_payoff,
    subsearch_index,
    subsearch_payoff,
    validate_subsearch,
)
from .solver import TreeSolution, sample_search, searcher_guarantee, searcher_mix, solve_tree

__all__ = [
    "RootedTree",
    "Subsearch",
    "TreeSolution",
    "Vertex",
    "check_expanding_search",
    "count_expanding_searches",
    "enumerate_depth_first_searches",
    "enumerate_expanding_searches",
    "is_normalized",
    "normalize_degree3",
    "pi",
    "require_valid_tree",
    "sample_search",
    "search_payoff",
    "searcher_guarantee",
    "searcher_mix",
    "solve_tree",
    "subsearch_index",
    "subsearch_payoff",
    "validate_subsearch",
]
