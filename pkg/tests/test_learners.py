import pytest
from hypothesis import given, settings

from core.adversary import RandomAdversary, TreeAdversary
from core.constants import WEIGHT_TOLERANCE
from core.dimensions import ildim_multiclass
from core.engine import GameConfig, run_classic_game, run_game, world_for
from core.errors import DomainError, ProtocolError
from core.generator import pair_family_instance
from core.learners import (
    BISOA,
    ISOA,
    SOA,
    BanditFeedback,
    BanditReduction,
    BaselineWrapper,
    ConstantLearner,
    FixedLearner,
    FullFeedback,
    MulticlassISOA,
    WeightedISOA,
    build_learner,
    price_of_bandit_bound,
)
from core.response import maximizers
from tests.strategies import instances


def _non_bottom(h):
    return [u for u, y in h.items() if y != 0]


def test_isoa_sends_agent_to_the_sink(f2):
    x1, x1p = f2.graph.index("x1"), f2.graph.index("x1'")
    learner = ISOA(f2)
    assert learner.publish(x1) == {x1: 0, x1p: 1}


def test_isoa_first_move_on_f1(f1):
    learner = ISOA(f1)
    assert learner.publish(0) == {0: 1, 1: 1}
    learner.update(FullFeedback(x=0, v=0, label=0, mistake=True))
    assert learner.vs.mask == 0b0011
    assert learner.dimension() == 1


def test_isoa_needs_binary_labels(f3):
    with pytest.raises(DomainError):
        ISOA(f3)


def test_multiclass_isoa_rejects_bandit_feedback(f3):
    learner = MulticlassISOA(f3)
    learner.publish(0)
    with pytest.raises(ProtocolError):
        learner.update(BanditFeedback(x=0, v=0, mistake=True))


def test_multiclass_publications_have_one_non_bottom_label(f3, f4):
    for learner in (MulticlassISOA(f3), WeightedISOA(f4), BISOA(f3)):
        for x in range(f3.graph.n):
            assert len(_non_bottom(learner.publish(x))) <= 1


def test_weighted_isoa_moves_only_for_paying_labels(f4):
    learner = WeightedISOA(f4)
    h = learner.publish(0)
    v = maximizers(h, 0, f4)
    assert len(v) == 1
    if v[0] != 0:
        assert h[v[0]] not in f4.labels.unmotivating(f4.graph.cost(0, v[0]))


def test_bisoa_only_learns_on_mistakes(f3):
    learner = BISOA(f3)
    h = learner.publish(0)
    before = learner.vs
    (v,) = maximizers(h, 0, f3)
    learner.update(BanditFeedback(x=0, v=v, mistake=False))
    assert learner.vs == before
    learner.update(BanditFeedback(x=0, v=v, mistake=True))
    assert learner.dimension() < learner.calc.dimension("bil", before)


def test_clone_is_independent(f1):
    learner = ISOA(f1)
    twin = learner.clone()
    twin.publish(0)
    twin.update(FullFeedback(x=0, v=0, label=0, mistake=True))
    assert learner.vs == f1.full()
    assert twin.state_key() != learner.state_key()


def test_baseline_never_moves_agents(f3):
    learner = BaselineWrapper(f3)
    for x in range(f3.graph.n):
        assert maximizers(learner.publish(x), x, f3) == (x,)


def test_constant_and_fixed_learners(f2):
    assert ConstantLearner(f2).publish(0) == {0: 0, 1: 0}
    fixed = FixedLearner.top_on_sinks(f2)
    assert fixed.publish(0) == {0: 0, 1: 1}
    assert fixed.publish(1) == {1: 1}


def test_build_learner_registry(f1):
    assert isinstance(build_learner("isoa", f1), ISOA)
    assert isinstance(build_learner("reduction", f1), BanditReduction)
    with pytest.raises(ValueError):
        build_learner("oracle", f1)


def test_price_of_bandit_bound():
    assert price_of_bandit_bound(2, 1, 0) == 0
    assert price_of_bandit_bound(2, 1, 3) == pytest.approx(2 * 2 * 2 * 0.6931471805599453 * 3)


def test_soa_predicts_the_heavier_side(f2):
    learner = SOA(f2)
    # x1' is 1 everywhere; the only label with a nonempty restriction wins
    assert learner.predict(f2.graph.index("x1'")) == 1
    learner.update(0, 1)
    assert learner.dimension() == 1


def test_sink_learner_is_perfect_on_the_pair_family():
    instance = pair_family_instance(3)
    world = world_for(instance, "binary")
    for seed in range(3):
        learner = FixedLearner.top_on_sinks(world)
        adversary = RandomAdversary(world, "binary", seed=seed)
        transcript = run_game(learner, adversary, GameConfig(setting="binary", horizon=30, seed=seed))
        assert transcript.mistakes == 0


@settings(max_examples=50, deadline=None)
@given(instance=instances(max_hyps=10))
def test_wrapping_keeps_the_mistake_count(instance):
    config = GameConfig(setting="multiclass-full", horizon=15, seed=3)

    world = world_for(instance, "multiclass-full")
    wrapped = run_game(BaselineWrapper(world), RandomAdversary(world, "multiclass-full", seed=11), config)

    plain_world = world_for(instance, "classic")
    plain = run_classic_game(SOA(plain_world), RandomAdversary(plain_world, "multiclass-full", seed=11), config)

    assert wrapped.mistakes == plain.mistakes
    assert [r.x for r in wrapped.rounds] == [r.x for r in plain.rounds]


@settings(max_examples=40, deadline=None)
@given(instance=instances(max_nodes=4, max_degree=2, labels=(2, 3, 4), max_hyps=8))
def test_reduction_weight_decay_and_bound(instance):
    world = world_for(instance, "multiclass-bandit")
    k, degree = world.labels.k, world.graph.max_degree
    floor = 1 - 1 / (2 * k * (degree + 1))
    bound = price_of_bandit_bound(k, degree, ildim_multiclass(world))

    for seed in range(2):
        learner = BanditReduction(world)
        adversary = RandomAdversary(world, "multiclass-bandit", seed=seed)
        transcript = run_game(learner, adversary, GameConfig(setting="multiclass-bandit", horizon=25, seed=seed))

        assert transcript.mistakes <= bound + WEIGHT_TOLERANCE
        assert len(learner.decay_log) == transcript.mistakes
        for entry in learner.decay_log:
            assert entry["factor"] <= floor + WEIGHT_TOLERANCE
            if entry["type"] == 1:
                assert entry["factor"] <= 1 - 1 / (2 * (degree + 1)) + WEIGHT_TOLERANCE


def test_reduction_vs_tree_adversary(f3):
    world = world_for(f3, "multiclass-bandit")
    learner = BanditReduction(world)
    transcript = run_game(learner, TreeAdversary(world, "multiclass-bandit"), GameConfig(setting="multiclass-bandit"))
    assert transcript.mistakes <= price_of_bandit_bound(3, world.graph.max_degree, ildim_multiclass(world))
    assert learner.dimension() <= ildim_multiclass(world)


def test_reduction_type1_spawns_one_child_per_hidden_label(f3):
    world = world_for(f3, "multiclass-bandit")
    reduction = BanditReduction(world, base_factory=lambda inst: ConstantLearner(inst, 0))
    assert reduction.publish(0) == {0: 0, 1: 0}

    reduction.update(BanditFeedback(x=0, v=0, mistake=True))
    assert [e.history for e in reduction.experts] == [((0, 1),), ((0, 2),)]
    assert [e.weight for e in reduction.experts] == [0.25, 0.25]
    assert reduction.decay_log[-1]["type"] == 1
    assert reduction.decay_log[-1]["factor"] == pytest.approx(0.5)


@pytest.mark.parametrize("literal, node", [(False, 1), (True, 0)])
def test_reduction_type2_update_node(f3, literal, node):
    world = world_for(f3, "multiclass-bandit")
    reduction = BanditReduction(
        world,
        base_factory=lambda inst: FixedLearner(inst, {0: 0, 1: 1}),
        literal_type2_update=literal,
    )
    h = reduction.publish(0)
    assert h == {0: 0, 1: 1}
    assert maximizers(h, 0, world) == (1,)

    reduction.update(BanditFeedback(x=0, v=1, mistake=True))
    assert [e.history for e in reduction.experts] == [((node, 0),), ((node, 2),)]
    assert reduction.decay_log[-1]["type"] == 2


def test_reduction_mistake_keeps_only_consistent_children(f3):
    world = world_for(f3, "multiclass-bandit")
    reduction = BanditReduction(world)
    h = reduction.publish(0)
    (v,) = maximizers(h, 0, world)
    reduction.update(BanditFeedback(x=0, v=v, mistake=True))
    assert reduction.experts
    assert all(not e.learner.vs.is_empty for e in reduction.experts)
    assert reduction.total_weight <= 1 - 1 / (2 * 3 * (world.graph.max_degree + 1)) + WEIGHT_TOLERANCE
