import pytest
from hypothesis import given, settings

from core.adversary import (
    ExhaustiveAdversary,
    RandomAdversary,
    TreeAdversary,
    build_adversary,
    is_bandit,
)
from core.dimensions import KIND_FOR_SETTING, calculator_for, wildim
from core.engine import GameConfig, run_game, world_for
from core.errors import DomainError
from core.learners import BISOA, ISOA, BaselineWrapper, ConstantLearner, MulticlassISOA, WeightedISOA
from core.trees import enumerate_shattered_tree
from tests.strategies import binary_instances, multiclass_instances


def test_is_bandit():
    assert is_bandit("multiclass-bandit")
    assert not is_bandit("multiclass-full")
    assert not is_bandit("binary")


def test_tree_adversary_forces_ildim_on_f1(f1):
    transcript = run_game(ISOA(f1), TreeAdversary(f1, "binary"), GameConfig())
    assert transcript.mistakes == 2
    assert all(r.mistake for r in transcript.rounds)


def test_tree_adversary_beats_a_constant_learner(f1):
    transcript = run_game(ConstantLearner(f1), TreeAdversary(f1, "binary"), GameConfig())
    assert transcript.mistakes == 2


def test_tree_adversary_yields_without_a_tree(f2):
    transcript = run_game(ISOA(f2), TreeAdversary(f2, "binary"), GameConfig())
    assert transcript.rounds == []


def test_explicit_tree_is_walked(f1):
    tree = enumerate_shattered_tree(f1, "il-binary", 2)
    adversary = TreeAdversary(f1, "binary", tree=tree)
    assert adversary.depth == 2
    transcript = run_game(ISOA(f1), adversary, GameConfig())
    assert transcript.mistakes == 2
    assert transcript.rounds[0].x == tree.node


def test_littlestone_tree_punishes_the_baseline(f2):
    adversary = TreeAdversary(f2, "binary", kind="littlestone")
    transcript = run_game(BaselineWrapper(f2), adversary, GameConfig())
    assert transcript.mistakes == 2


def test_tree_kind_must_match_feedback(f3):
    world = world_for(f3, "multiclass-bandit")
    with pytest.raises(DomainError):
        TreeAdversary(world, "multiclass-bandit", kind="il-multiclass")
    with pytest.raises(DomainError):
        TreeAdversary(world, "multiclass-full", kind="bil")


def test_random_adversary_is_reproducible(f3):
    def play(seed):
        adversary = RandomAdversary(f3, "multiclass-full", seed=seed)
        config = GameConfig(setting="multiclass-full", horizon=12, seed=seed)
        return run_game(MulticlassISOA(f3), adversary, config).to_dict(f3)

    assert play(4) == play(4)


def test_random_adversary_stays_realizable(f3):
    for seed in range(5):
        adversary = RandomAdversary(f3, "multiclass-bandit", seed=seed)
        config = GameConfig(setting="multiclass-bandit", horizon=20, seed=seed)
        transcript = run_game(BISOA(f3), adversary, config)
        assert transcript.witness is not None


def test_exhaustive_adversary_matches_ildim(f1, f2):
    for instance, expected in ((f1, 2), (f2, 0)):
        learner = ISOA(instance)
        adversary = ExhaustiveAdversary(instance, "binary", learner)
        transcript = run_game(learner, adversary, GameConfig())
        assert transcript.mistakes == expected


def test_exhaustive_value_is_memoized(f1):
    learner = ISOA(f1)
    adversary = ExhaustiveAdversary(f1, "binary", learner)
    assert adversary.value(learner, f1.full().mask) == 2
    assert adversary.memo_size > 0
    assert learner.vs == f1.full()


def test_exhaustive_adversary_needs_deterministic_ties(f1):
    with pytest.raises(DomainError):
        ExhaustiveAdversary(f1, "binary", ISOA(f1), tie_policy="seeded-random")


def test_build_adversary(f1):
    assert isinstance(build_adversary("tree", f1, "binary"), TreeAdversary)
    assert isinstance(build_adversary("random", f1, "binary", seed=3), RandomAdversary)
    assert isinstance(build_adversary("exhaustive", f1, "binary", ISOA(f1)), ExhaustiveAdversary)
    with pytest.raises(ValueError):
        build_adversary("exhaustive", f1, "binary")
    with pytest.raises(ValueError):
        build_adversary("oracle", f1, "binary")


@settings(max_examples=25, deadline=None)
@given(instance=binary_instances(max_nodes=3, max_hyps=6))
def test_tree_forces_exactly_the_dimension_binary(instance):
    dim = calculator_for(instance).dimension(KIND_FOR_SETTING["binary"], instance.full())
    transcript = run_game(ISOA(instance), TreeAdversary(instance, "binary"), GameConfig())
    assert transcript.mistakes == dim


@settings(max_examples=20, deadline=None)
@given(instance=multiclass_instances(max_nodes=3, max_hyps=6))
def test_tree_forces_exactly_the_dimension_multiclass(instance):
    for setting, learner_cls in (("multiclass-full", MulticlassISOA), ("multiclass-bandit", BISOA)):
        world = world_for(instance, setting)
        dim = calculator_for(world).dimension(KIND_FOR_SETTING[setting], world.full())
        transcript = run_game(learner_cls(world), TreeAdversary(world, setting), GameConfig(setting=setting))
        assert transcript.mistakes == dim


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_adversary_stays_within_the_bound_on_f1(f1, seed):
    adversary = RandomAdversary(f1, "binary", seed=seed)
    transcript = run_game(ISOA(f1), adversary, GameConfig(horizon=30, seed=seed))
    assert len(transcript.rounds) == 30
    assert transcript.mistakes <= 2


def test_tree_adversary_forces_wildim_on_f4(f4):
    world = world_for(f4, "weighted-full")
    adversary = TreeAdversary(world, "weighted-full")
    assert adversary.kind.value == "wil"
    transcript = run_game(WeightedISOA(world), adversary, GameConfig(setting="weighted-full"))
    assert transcript.mistakes == wildim(f4) == 2
