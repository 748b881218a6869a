from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from treeslp.trees import Tree, print_term

DATA = Path(__file__).parent / "data"

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")


def pinned() -> dict:
    """Empirical constants recorded from the first green run."""
    return json.loads((DATA / "pinned.json").read_text())


def distinct_subtrees(t: Tree) -> int:
    """Oracle: number of distinct subtrees, via canonical strings."""
    return len({print_term(t.subtree(v)) for v in range(t.num_nodes)})


def random_ranked_tree(n: int, alphabet: dict, seed: int) -> Tree:
    """Random tree over ``alphabet`` (symbol -> rank) with about ``n`` nodes."""
    rng = random.Random(seed)
    leaves = [s for s, r in alphabet.items() if r == 0]
    inner = [s for s, r in alphabet.items() if r > 0]
    labels, arities = [], []
    budget = n - 1
    open_slots = 1
    while open_slots:
        open_slots -= 1
        if budget > 0 and inner and (rng.random() < 0.6 or open_slots == 0):
            s = rng.choice(inner)
            budget -= alphabet[s]
            open_slots += alphabet[s]
        else:
            s = rng.choice(leaves)
        labels.append(s)
        arities.append(alphabet[s])
    return Tree.from_preorder(labels, arities)


ALPHABETS = [
    {"a": 0, "b": 2},
    {"a": 0, "c": 0, "f": 2, "g": 1},
    {"a": 0, "h": 3, "g": 1},
    {"a": 0, "b": 0, "k": 4, "f": 2},
]


@st.composite
def ranked_trees(draw, max_nodes=120):
    alphabet = draw(st.sampled_from(ALPHABETS))
    n = draw(st.integers(1, max_nodes))
    seed = draw(st.integers(0, 2 ** 32))
    return random_ranked_tree(n, alphabet, seed)


@st.composite
def unranked_trees(draw, max_nodes=60):
    n = draw(st.integers(1, max_nodes))
    seed = draw(st.integers(0, 2 ** 32))
    from treeslp.corpus import gen_random_unranked
    return gen_random_unranked(n, draw(st.integers(1, 3)), seed)


@pytest.fixture
def perfect7():
    from treeslp.grammar import parse_tslp
    return parse_tslp((DATA / "perfect7.tslp").read_text())


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
