"""Mistake bounds of the learners, checked end to end on small random classes."""

import numpy as np
import pytest
from hypothesis import given, settings

from core.adversary import ExhaustiveAdversary, RandomAdversary, TreeAdversary
from core.dimensions import KIND_FOR_SETTING, calculator_for, ildim_binary, ldim
from core.engine import GameConfig, run_game, world_for
from core.generator import generate_instance, pair_family_instance
from core.learners import BISOA, ISOA, BaselineWrapper, MulticlassISOA, WeightedISOA
from core.oracle import certify_dimension
from tests.strategies import binary_instances, instances, multiclass_instances

LEARNER_FOR = {
    "binary": ISOA,
    "multiclass-full": MulticlassISOA,
    "multiclass-bandit": BISOA,
    "weighted-full": WeightedISOA,
}


def _optimal_play(instance, setting):
    world = world_for(instance, setting)
    dim = calculator_for(world).dimension(KIND_FOR_SETTING[setting], world.full())
    learner = LEARNER_FOR[setting](world)
    adversary = ExhaustiveAdversary(world, setting, learner)
    return run_game(learner, adversary, GameConfig(setting=setting)).mistakes, dim


@settings(max_examples=20, deadline=None)
@given(instance=binary_instances(max_nodes=3, max_hyps=6))
def test_isoa_meets_the_binary_dimension(instance):
    mistakes, dim = _optimal_play(instance, "binary")
    assert mistakes == dim


@settings(max_examples=15, deadline=None)
@given(instance=multiclass_instances(max_nodes=3, max_hyps=5))
def test_multiclass_learners_meet_their_dimensions(instance):
    for setting in ("multiclass-full", "multiclass-bandit"):
        mistakes, dim = _optimal_play(instance, setting)
        assert mistakes == dim, setting


@settings(max_examples=15, deadline=None)
@given(instance=instances(max_nodes=3, labels=(3,), max_hyps=5, weighted=True))
def test_weighted_isoa_meets_wildim(instance):
    mistakes, dim = _optimal_play(instance, "weighted-full")
    assert mistakes == dim


@settings(max_examples=40, deadline=None)
@given(instance=instances(max_nodes=4, max_hyps=8, weighted=None))
def test_every_mistake_lowers_the_dimension(instance):
    settings_ = ["multiclass-full", "multiclass-bandit"]
    if instance.labels.k == 2:
        settings_.append("binary")
    if instance.graph.is_weighted:
        settings_.append("weighted-full")

    for setting in settings_:
        world = world_for(instance, setting)
        learner = LEARNER_FOR[setting](world)
        adversary = RandomAdversary(world, setting, seed=5)
        transcript = run_game(learner, adversary, GameConfig(setting=setting, horizon=30, seed=5))

        last = transcript.initial_dim
        for r in transcript.rounds:
            if r.mistake:
                assert r.dim < last, setting
            else:
                assert r.dim <= last, setting
            last = r.dim
        assert transcript.mistakes <= transcript.initial_dim


@pytest.mark.parametrize("pairs", [1, 2, 3, 4, 5])
def test_pair_family_separates_the_two_games(pairs):
    instance = pair_family_instance(pairs)
    assert ildim_binary(instance) == 0
    assert ldim(instance) == pairs

    learner = ISOA(instance)
    exhaustive = run_game(learner, ExhaustiveAdversary(instance, "binary", learner), GameConfig())
    assert exhaustive.mistakes == 0

    assert run_game(ISOA(instance), TreeAdversary(instance, "binary"), GameConfig()).mistakes == 0
    for seed in range(3):
        adversary = RandomAdversary(instance, "binary", seed=seed)
        assert run_game(ISOA(instance), adversary, GameConfig(horizon=40, seed=seed)).mistakes == 0

    baseline = run_game(
        BaselineWrapper(instance), TreeAdversary(instance, "binary", kind="littlestone"), GameConfig()
    )
    assert baseline.mistakes == pairs


def _sweep_instance(seed, labels, max_nodes, max_degree, max_hyps, weighted=False):
    """Sizes drawn from the seed so every sweep case is a fixed instance."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_nodes + 1))
    degree = int(rng.integers(1, max_degree + 1))
    m = int(rng.integers(2, min(max_hyps, labels ** n) + 1))
    return generate_instance(n, degree, labels, m, weighted=weighted, seed=seed)


@pytest.mark.parametrize("seed", range(200))
def test_binary_sweep_value_and_isoa_match_the_dimension(seed):
    instance = _sweep_instance(seed, labels=2, max_nodes=6, max_degree=3, max_hyps=32)
    verdict = certify_dimension(instance, "binary")
    assert verdict["equal"], verdict

    learner = ISOA(instance)
    transcript = run_game(learner, ExhaustiveAdversary(instance, "binary", learner), GameConfig())
    assert transcript.mistakes == verdict["dimension"]


@pytest.mark.parametrize("seed", range(40))
def test_three_label_sweep_values_match_the_dimensions(seed):
    instance = _sweep_instance(seed, labels=3, max_nodes=4, max_degree=3, max_hyps=32, weighted=True)
    for setting in ("multiclass-full", "multiclass-bandit", "weighted-full"):
        verdict = certify_dimension(instance, setting)
        assert verdict["equal"], verdict
