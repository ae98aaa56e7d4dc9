from itertools import product

import numpy as np
import pytest

from core.response import (
    TiePolicy,
    best_response,
    binary_improvement_set,
    gain,
    improvement_targets,
    maximizers,
)
from tests.strategies import build_instance


@pytest.fixture
def fork():
    """a -> b and a -> c, binary, zero costs."""
    return build_instance(["a", "b", "c"], [("a", "b", 0.0), ("a", "c", 0.0)], 2, [[0, 1, 1]])


def test_agent_moves_to_positive_neighbor(f1):
    assert maximizers({0: 0, 1: 1}, 0, f1) == (1,)
    assert best_response({0: 0, 1: 1}, 0, f1) == 1


def test_agent_stays_without_strict_gain(f1):
    assert maximizers({0: 1, 1: 1}, 0, f1) == (0,)
    assert maximizers({0: 0, 1: 0}, 0, f1) == (0,)
    # Missing entries read as the bottom label
    assert maximizers({}, 0, f1) == (0,)


def test_costs_gate_the_move(f4):
    a, b = 0, 1
    assert gain({a: 0, b: 1}, a, b, f4) == pytest.approx(-0.5)
    assert maximizers({a: 0, b: 1}, a, f4) == (a,)
    assert maximizers({a: 0, b: 2}, a, f4) == (b,)
    assert maximizers({a: 1, b: 2}, a, f4) == (a,)


def test_tie_policies(fork):
    h = {0: 0, 1: 1, 2: 1}
    assert best_response(h, 0, fork, TiePolicy.ADVERSARIAL) == (1, 2)
    assert best_response(h, 0, fork, TiePolicy.LEXICOGRAPHIC_MIN) == 1

    picks = {
        best_response(h, 0, fork, "seeded-random", np.random.default_rng(seed))
        for seed in range(20)
    }
    assert picks <= {1, 2}
    with pytest.raises(ValueError):
        best_response(h, 0, fork, "seeded-random")


def test_seeded_random_is_reproducible(fork):
    h = {0: 0, 1: 1, 2: 1}
    first = [best_response(h, 0, fork, "seeded-random", np.random.default_rng(7)) for _ in range(5)]
    second = [best_response(h, 0, fork, "seeded-random", np.random.default_rng(7)) for _ in range(5)]
    assert first == second


def test_improvement_targets(fork):
    plus, minus = improvement_targets({0: 0, 1: 1}, 0, fork)
    assert plus == (1,)
    assert minus == (0, 2)


def test_binary_improvement_set_matches_best_response(fork, f1, f2):
    for instance in (fork, f1, f2):
        for x in range(instance.graph.n):
            nbrs = instance.graph.neighbors(x)
            for labels in product((0, 1), repeat=len(nbrs)):
                h = dict(zip(nbrs, labels))
                assert binary_improvement_set(h, x, instance) == maximizers(h, x, instance)
