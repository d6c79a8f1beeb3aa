import os
import sys
from fractions import Fraction
from pathlib import Path

# Ensure project root and src are on sys.path for tests
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
for p in [str(ROOT), str(SRC)]:
    if p not in sys.path:
        sys.path.insert(0, p)

# Keep test runs from writing log files
os.environ.setdefault("RESCUE_GAMES_LOG_FILE", "")

import pytest  # noqa: E402

from src.tree import RootedTree  # noqa: E402

F = Fraction
INSTANCES = ROOT / "data" / "instances"


def random_rational(rng, max_denominator=20, low=1, high=None):
    """Uniform-ish rational strictly inside (0, 1) with a bounded denominator."""
    denominator = rng.randint(2, max_denominator)
    numerator = rng.randint(low, (high or denominator) - 1)
    return F(numerator, denominator)


def random_tree(rng, n_vertices, max_children=None, allow_ones=True):
    """Random recursive tree on ids v0..v{n-1}, rooted at v0, with valid probabilities."""
    ids = [f"v{i}" for i in range(n_vertices)]
    edges = []
    children = {v: 0 for v in ids}
    for pos in range(1, n_vertices):
        candidates = [
            ids[j] for j in range(pos) if max_children is None or children[ids[j]] < max_children
        ]
        parent = rng.choice(candidates)
        children[parent] += 1
        edges.append((parent, ids[pos]))
    probabilities = {}
    for v in ids:
        if allow_ones and children[v] and rng.random() < 0.2:
            probabilities[v] = F(1)
        else:
            probabilities[v] = random_rational(rng, 10)
    return RootedTree.build(probabilities, edges, "v0")


@pytest.fixture
def worked_tree():
    """Root O with leaf A and internal D; D has leaves B and C."""
    return RootedTree.build(
        {"O": "1/2", "A": "2/3", "D": "3/5", "B": "1/3", "C": "1/2"},
        [("O", "A"), ("O", "D"), ("D", "B"), ("D", "C")],
        "O",
    )


@pytest.fixture
def instances_dir():
    return INSTANCES
