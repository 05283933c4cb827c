from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings

from conftest import cut_flow, instance, polytree_instances
from dtslide import (
    Digraph,
    GraphError,
    InstanceError,
    blocking_arcs,
    check_nonnegative,
    components,
    compute_arc_flow,
    reduce_instance,
    rigid_exception,
    rigid_tokens,
)
from dtslide.flow import Kind, topological_order
from dtslide.oracle import bfs_shortest, matching_exists_brute, path_flow

STAR = [(2, 1), (3, 1), (1, 4), (1, 5)]
PATH3 = [(1, 2), (2, 3)]
RIGID_STAR = [(1, 2), (2, 3), (4, 2)]


def reduce(inst):
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    r = rigid_tokens(inst, w)
    b = blocking_arcs(inst.graph, w, inst.source, inst.target)
    return w, r, b, reduce_instance(inst, r, b, w)


def test_star_flow_is_one_everywhere():
    w = compute_arc_flow(Digraph(5, STAR), {2, 3}, {4, 5})
    assert w.as_dict() == cut_flow(5, STAR, {2, 3}, {4, 5}) == {a: 1 for a in STAR}


def test_equal_token_sets_give_zero_flow():
    w = compute_arc_flow(Digraph(5, STAR), {2, 4}, {2, 4})
    assert set(w.as_dict().values()) == {0}


def test_path3_flow():
    w = compute_arc_flow(Digraph(3, PATH3), {1}, {3})
    assert w.as_dict() == cut_flow(3, PATH3, {1}, {3}) == {(1, 2): 1, (2, 3): 1}
    assert w[(1, 2)] == 1 and w.total() == 2 and len(w) == 2


def test_flow_lookup_of_missing_arc():
    w = compute_arc_flow(Digraph(3, PATH3), {1}, {3})
    with pytest.raises(KeyError):
        w[(2, 1)]


def test_flow_rejects_non_polytree_and_unequal_sets():
    with pytest.raises(GraphError):
        compute_arc_flow(Digraph(3, [(1, 2), (2, 3), (3, 1)]), {1}, {2})
    with pytest.raises(InstanceError):
        compute_arc_flow(Digraph(3, PATH3), {1}, {2, 3})


def test_nonnegative_checks():
    assert check_nonnegative(compute_arc_flow(Digraph(5, STAR), {2, 3}, {4, 5}))
    w = compute_arc_flow(Digraph(2, [(1, 2)]), {2}, {1})
    assert w[(1, 2)] == -1 and not check_nonnegative(w)
    assert check_nonnegative(compute_arc_flow(Digraph(3, PATH3), {2}, {2}))


def test_rigid_token_on_identical_sets():
    inst = instance(3, PATH3, {2}, {2})
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    assert rigid_tokens(inst, w) == {2}
    assert not rigid_exception(inst.graph, {2}, w)


def test_star_has_no_rigid_tokens():
    inst = instance(5, STAR, {2, 3}, {4, 5})
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    assert rigid_tokens(inst, w) == frozenset()
    assert not rigid_exception(inst.graph, set(), w)


def test_rigid_token_beside_moving_token():
    inst = instance(4, RIGID_STAR, {1, 4}, {3, 4})
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    assert w.as_dict() == cut_flow(4, RIGID_STAR, {1, 4}, {3, 4})
    assert w[(4, 2)] == 0
    r = rigid_tokens(inst, w)
    assert r == {4}
    assert rigid_exception(inst.graph, r, w)
    assert not bfs_shortest(inst).reachable


def test_blocking_arc_alone():
    inst = instance(2, [(1, 2)], {1}, {2})
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    assert blocking_arcs(inst.graph, w, inst.source, inst.target) == {(1, 2)}


def test_blocking_arc_with_zero_flow_neighbour():
    arcs = [(3, 1), (1, 2)]
    w, _, b, _ = reduce(instance(3, arcs, {1}, {2}))
    assert cut_flow(3, arcs, {1}, {2})[(3, 1)] == 0
    assert b == {(1, 2)}


def test_adjacent_unit_flows_are_not_blocking():
    _, _, b, _ = reduce(instance(3, PATH3, {1}, {3}))
    assert b == frozenset()


def test_reduction_around_blocking_arc():
    inst = instance(3, [(3, 1), (1, 2)], {1}, {2})
    _, _, _, red = reduce(inst)
    pieces = {sub.vertices: sub.kind for sub in red.components}
    assert pieces == {(1, 2): Kind.BLOCKING, (3,): Kind.ACTIVE}
    assert sorted(map(tuple, components(inst.graph, inst.graph.arc_set - red.removed))) == [(1, 2), (3,)]
    blocking = next(s.label for s in red.components if s.kind is Kind.BLOCKING)
    active = next(s.label for s in red.components if s.kind is Kind.ACTIVE)
    assert red.precedence == {(blocking, active)}
    assert not red.components[active].source


def test_reduction_without_rigid_or_blocking_is_the_whole_tree():
    _, r, b, red = reduce(instance(5, STAR, {2, 3}, {4, 5}))
    assert not r and not b
    assert len(red.components) == 1
    assert red.components[0].kind is Kind.ACTIVE
    assert red.components[0].vertices == (1, 2, 3, 4, 5)
    assert red.precedence == frozenset()


def test_reduction_isolates_rigid_token():
    _, r, _, red = reduce(instance(3, PATH3, {2}, {2}))
    assert r == {2}
    assert {sub.vertices: sub.kind for sub in red.components} == {
        (1,): Kind.ACTIVE, (2,): Kind.RIGID, (3,): Kind.ACTIVE}
    assert red.removed == set(PATH3)


def test_topological_order_prefers_small_index_and_detects_cycles():
    assert topological_order(4, [(3, 0), (2, 1)]) == [2, 1, 3, 0]
    with pytest.raises(GraphError):
        topological_order(2, [(0, 1), (1, 0)])


@given(polytree_instances(max_n=10, max_k=4))
@settings(max_examples=400, deadline=None)
def test_flow_matches_cut_definition(inst):
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    assert w.as_dict() == cut_flow(inst.graph.n, inst.graph.arcs, inst.source, inst.target)


@given(polytree_instances(max_n=8, max_k=4))
@settings(max_examples=150, deadline=None)
def test_flow_equals_path_count_for_every_bijection(inst):
    t, x, y = inst.graph, sorted(inst.source), sorted(inst.target)
    w = compute_arc_flow(t, x, y).as_dict()
    for perm in itertools.permutations(range(len(y))):
        assert path_flow(t, x, y, perm) == w


@given(polytree_instances(max_n=8, max_k=3))
@settings(max_examples=300, deadline=None)
def test_nonnegative_flow_iff_path_matching(inst):
    w = compute_arc_flow(inst.graph, inst.source, inst.target)
    expected = matching_exists_brute(inst.graph, sorted(inst.source), sorted(inst.target))
    assert check_nonnegative(w) == expected


@given(polytree_instances(max_n=10, max_k=4))
@settings(max_examples=300, deadline=None)
def test_reduction_invariants(inst):
    w, r, b, red = reduce(inst)
    if not check_nonnegative(w) or rigid_exception(inst.graph, r, w):
        return
    flows = cut_flow(inst.graph.n, inst.graph.arcs, inst.source, inst.target)
    for arc in red.removed:
        assert flows[arc] == 0
    blocks = sorted(sub.vertices for sub in red.components)
    assert sorted(v for block in blocks for v in block) == list(range(1, inst.graph.n + 1))
    kept = inst.graph.arc_set - red.removed
    assert blocks == sorted(tuple(c) for c in components(inst.graph, kept))
    topological_order(len(red.components), red.precedence)
    for sub in red.components:
        for arc in sub.arcs:
            assert sub.flow(*arc) == flows[arc]
        if sub.kind is Kind.RIGID:
            (v,) = sub.vertices
            assert v in r and sub.source == sub.target == {v}
        if sub.kind is Kind.BLOCKING:
            assert len(sub.vertices) == 2 and tuple(sub.arcs)[0] in b
