import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DomainError
from core.instance_io import instance_to_payload, parse_instance
from core.model import (
    HypothesisClass,
    ImprovementGraph,
    LabelSpace,
    iter_members,
    lowest_member,
    prune_useless_edges,
    validate,
)
from tests.strategies import binary_instances, build_instance, instances


def test_from_edges_adds_self_loops_and_sorts():
    graph = ImprovementGraph.from_edges(("a", "b", "c"), [(0, 2, 0.5), (0, 1, 0.0)])
    assert graph.neighbors(0) == (0, 1, 2)
    assert graph.neighbors(1) == (1,)
    assert graph.others(0) == (1, 2)
    assert graph.cost(0, 2) == 0.5
    assert graph.cost(2, 2) == 0.0
    assert graph.max_degree == 3
    assert graph.is_weighted


def test_cost_outside_improvement_set_raises(f1):
    with pytest.raises(DomainError):
        f1.graph.cost(1, 0)


def test_unmotivating_labels_boundary(f4):
    labels = f4.labels
    assert labels.unmotivating(0.0) == frozenset({0})
    assert labels.unmotivating(1.5) == frozenset({0, 1})
    # Gain exactly equal to the cost never moves the agent
    assert labels.unmotivating(1.0) == frozenset({0, 1})


def test_label_masks(f1):
    masks = f1.hypotheses.label_masks
    a, b = f1.graph.index("a"), f1.graph.index("b")
    # h00, h01, h10, h11 in file order: bit i is hypothesis i
    assert masks[a][1] == 0b1100
    assert masks[a][0] == 0b0011
    assert masks[b][1] == 0b1010
    assert f1.hypotheses.full_mask == 0b1111


def test_version_space_algebra(f1):
    vs = f1.full()
    a = f1.graph.index("a")
    assert len(vs) == 4
    assert len(vs.restrict(a, 1)) == 2
    assert len(vs.restrict_not(a, 1)) == 2
    assert vs.restrict(a, 1).issubset(vs)
    assert vs.restrict(a, 1).restrict(a, 0).is_empty
    assert vs.labels_on(a) == (0, 1)


def test_mask_helpers():
    assert list(iter_members(0b10110)) == [1, 2, 4]
    assert lowest_member(0b10100) == 2


def test_validate_reports_missing_self_loop_and_bad_labels():
    graph = ImprovementGraph(nodes=("a", "b"), adjacency=((1,), (1,)), costs=((0.0,), (0.0,)))
    labels = LabelSpace(names=("lo", "hi"), values=(1.0, 0.0))
    hclass = HypothesisClass(names=("h",), table=np.array([[0, 1]]), k=2)
    report = validate(graph, labels, hclass)
    assert not report.ok
    assert "missing self-loop at 'a'" in report.violations
    assert "non-monotone label values" in report.violations
    assert report.pruned_graph is None


def test_validate_reports_undefined_hypothesis():
    payload = {
        "nodes": ["a", "b"],
        "edges": [],
        "labels": [{"name": "0", "value": 0}, {"name": "1", "value": 1}],
        "hypotheses": [{"name": "partial", "labeling": {"a": "1"}}],
    }
    instance = parse_instance(payload)
    report = validate(instance.graph, instance.labels, instance.hypotheses)
    assert report.violations == ("hypothesis 'partial' undefined on ['b']",)


def test_fixtures_validate(f1, f2, f3, f4):
    for instance in (f1, f2, f3, f4):
        report = validate(instance.graph, instance.labels, instance.hypotheses)
        assert report.ok, report.violations


def test_prune_useless_edges():
    costly = build_instance(["a", "b"], [("a", "b", 2.5)], 3, [[0, 2]])
    pruned = prune_useless_edges(costly.graph, costly.labels)
    assert not pruned.has_edge(0, 1)
    assert pruned.has_edge(0, 0)

    report = validate(costly.graph, costly.labels, costly.hypotheses)
    assert report.pruned_edges == ((0, 1),)


def test_prune_keeps_useful_graph_object(f4):
    assert prune_useless_edges(f4.graph, f4.labels) is f4.graph


def test_for_setting(f3, f4):
    with pytest.raises(DomainError):
        f3.for_setting("binary")
    with pytest.raises(DomainError):
        f3.for_setting("telepathy")

    assert f4.for_setting("weighted-full") is f4
    unweighted = f4.for_setting("multiclass-full")
    assert not unweighted.graph.is_weighted
    assert unweighted.graph.adjacency == f4.graph.adjacency


def test_payload_round_trip(f4):
    again = parse_instance(instance_to_payload(f4))
    assert again.graph == f4.graph
    assert again.labels == f4.labels
    assert again.hypotheses.names == f4.hypotheses.names
    assert np.array_equal(again.hypotheses.table, f4.hypotheses.table)


def test_parse_rejects_undeclared_node():
    payload = {
        "nodes": ["a"],
        "edges": [{"from": "a", "to": "z"}],
        "labels": [{"name": "0", "value": 0}, {"name": "1", "value": 1}],
        "hypotheses": [],
    }
    with pytest.raises(ValueError, match="not a declared node"):
        parse_instance(payload)


def test_validate_reports_costly_self_loop():
    graph = ImprovementGraph(nodes=("a",), adjacency=((0,),), costs=((1.0,),))
    hclass = HypothesisClass(names=("h",), table=np.array([[1]]), k=2)
    report = validate(graph, LabelSpace.binary(), hclass)
    assert report.violations == ("self-loop cost nonzero at 'a'",)


def test_validate_reports_empty_class():
    payload = {
        "nodes": ["a", "b"],
        "edges": [{"from": "a", "to": "b", "cost": 0}],
        "labels": [{"name": "0", "value": 0}, {"name": "1", "value": 1}],
        "hypotheses": [],
    }
    instance = parse_instance(payload)
    assert len(instance.hypotheses) == 0
    report = validate(instance.graph, instance.labels, instance.hypotheses)
    assert report.violations == ("empty hypothesis class",)


@given(instance=binary_instances(max_nodes=5, max_hyps=16), data=st.data())
def test_binary_exclusion_is_the_other_label(instance, data):
    x = data.draw(st.integers(0, instance.graph.n - 1))
    vs = instance.full()
    assert vs.restrict_not(x, 0) == vs.restrict(x, 1)
    assert vs.restrict_not(x, 1) == vs.restrict(x, 0)


@given(instance=instances(max_nodes=5, labels=(2, 3, 4), max_hyps=16), data=st.data())
def test_restrictions_commute(instance, data):
    n, k = instance.graph.n, instance.labels.k
    x1 = data.draw(st.integers(0, n - 1))
    x2 = data.draw(st.integers(0, n - 1).filter(lambda x: x != x1))
    y1, y2 = data.draw(st.integers(0, k - 1)), data.draw(st.integers(0, k - 1))
    vs = instance.full()
    assert vs.restrict(x1, y1).restrict(x2, y2) == vs.restrict(x2, y2).restrict(x1, y1)
    assert vs.restrict_not(x1, y1).restrict(x2, y2) == vs.restrict(x2, y2).restrict_not(x1, y1)


@given(instance=instances(max_nodes=5, labels=(2, 3, 4), max_hyps=16), data=st.data())
def test_label_restrictions_partition_the_space(instance, data):
    x = data.draw(st.integers(0, instance.graph.n - 1))
    full = instance.hypotheses.full_mask
    vs = instance.version_space(full & data.draw(st.integers(0, full)))
    parts = [vs.restrict(x, y).mask for y in range(instance.labels.k)]

    union = 0
    for part in parts:
        assert part & union == 0
        union |= part
    assert union == vs.mask
    assert sum(bin(p).count("1") for p in parts) == len(vs)


@settings(max_examples=50)
@given(instance=instances(max_nodes=5, max_degree=3, labels=(2, 3, 4), weighted=True))
def test_pruning_is_idempotent(instance):
    once = prune_useless_edges(instance.graph, instance.labels)
    assert prune_useless_edges(once, instance.labels) is once
