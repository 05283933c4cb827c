from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cut_flow
from dtslide import classify, decide
from dtslide.fileio import write_instance
from dtslide.generators import (
    FAMILIES,
    GenSpec,
    gen_quad_path,
    gen_random_polytree,
    gen_yes_walk,
    generate,
    prufer_decode,
    random_undirected_graph,
    reduce_mis_to_dag,
    reduce_ts_to_oriented,
)
from dtslide.oracle import UndirectedGraph, bfs_shortest, multicolored_is_brute, undirected_ts_oracle


def test_ts_reduction_of_single_edge():
    inst = reduce_ts_to_oriented(UndirectedGraph(2, [(1, 2)]), [1], [2])
    assert inst.graph.n == 4 and inst.graph.m == 6
    assert inst.source == {1} and inst.target == {2}
    assert classify(inst.graph).oriented


def test_ts_reduction_of_edgeless_graph():
    inst = reduce_ts_to_oriented(UndirectedGraph(3, []), [1], [2])
    assert inst.graph.n == 6
    assert sorted(inst.graph.arcs) == [(1, 4), (2, 5), (3, 6)]


def test_ts_reduction_rejects_dependent_sets():
    with pytest.raises(ValueError):
        reduce_ts_to_oriented(UndirectedGraph(2, [(1, 2)]), [1, 2], [1, 2])


def test_mis_reduction_of_single_vertex():
    inst = reduce_mis_to_dag(UndirectedGraph(1, []), 1, [[1]])
    g = inst.graph
    assert g.n == 5
    u, v, w = {1, 2}, {3}, {4, 5}
    assert sum(1 for a, b in g.arcs if a in u and b in w) == 4
    assert sum(1 for a, b in g.arcs if a in u and b in v) == 1
    assert sum(1 for a, b in g.arcs if a in v and b in w) == 1
    assert g.m == 6
    assert inst.source == u and inst.target == w
    assert classify(g).dag


def test_mis_reduction_rejects_bad_partition():
    g = UndirectedGraph(3, [])
    with pytest.raises(ValueError):
        reduce_mis_to_dag(g, 2, [[1], [2]])
    with pytest.raises(ValueError):
        reduce_mis_to_dag(g, 2, [[1, 2], [2, 3]])
    with pytest.raises(ValueError):
        reduce_mis_to_dag(g, 1, [[1, 2], [3]])


def test_prufer_decode_small():
    assert prufer_decode([], 1) == []
    assert prufer_decode([], 2) == [(1, 2)]
    assert sorted(prufer_decode([4, 4], 4)) == [(1, 4), (2, 4), (3, 4)]


def test_random_polytree_small_sizes():
    assert gen_random_polytree(1, 7).m == 0
    g = gen_random_polytree(2, 7)
    assert g.m == 1 and set(g.arcs[0]) == {1, 2}
    directions = {gen_random_polytree(2, s).arcs for s in range(40)}
    assert directions == {((1, 2),), ((2, 1),)}


def test_random_polytree_is_deterministic():
    assert gen_random_polytree(50, 123).arcs == gen_random_polytree(50, 123).arcs
    assert gen_random_polytree(50, 123).arcs != gen_random_polytree(50, 124).arcs


def test_seeds_are_64_bit_patterns():
    assert gen_random_polytree(40, -1).arcs == gen_random_polytree(40, 2**64 - 1).arcs
    assert gen_random_polytree(40, -5).arcs != gen_random_polytree(40, 5).arcs


def test_yes_walk_without_steps_is_trivial():
    inst = gen_yes_walk(gen_random_polytree(20, 3), 3, 0, 3)
    assert inst.source == inst.target
    v = decide(inst)
    assert v.yes and v.length == 0


def test_quad_path_small():
    inst = gen_quad_path(3, 1)
    assert inst.source == {1} and inst.target == {3}
    assert decide(inst).length == 2
    inst = gen_quad_path(9, 2)
    assert decide(inst).length == 12 == bfs_shortest(inst).shortest_length
    assert sum(cut_flow(9, inst.graph.arcs, inst.source, inst.target).values()) == 12


def test_quad_path_length_is_quadratic():
    ratios = []
    for n in (400, 4000, 40000):
        k = n // 4
        length = decide(gen_quad_path(n, k)).length
        assert length == k * (n - 2 * k + 1)
        ratios.append(length / n**2)
    assert abs(ratios[-1] - 1 / 8) < 1e-4
    assert abs(ratios[0] - 1 / 8) > abs(ratios[-1] - 1 / 8)


def test_quad_path_rejects_too_many_tokens():
    with pytest.raises(ValueError):
        gen_quad_path(4, 2)


@pytest.mark.parametrize("family", FAMILIES)
def test_generate_is_deterministic(family):
    spec = GenSpec(family, 12, 2, 12, 99)
    assert write_instance(generate(spec)) == write_instance(generate(spec))


def test_generate_rejects_unknown_family():
    with pytest.raises(ValueError):
        generate(GenSpec("lattice", 5))


def test_generate_families_have_expected_structure():
    assert classify(generate(GenSpec("random-polytree", 30, 3, 0, 1)).graph).polytree
    assert classify(generate(GenSpec("yes-walk", 30, 3, 30, 1)).graph).polytree
    assert classify(generate(GenSpec("quad-path", 30, 7)).graph).polytree
    assert classify(generate(GenSpec("ts-reduction", 6, 2, 0, 1)).graph).oriented
    s = classify(generate(GenSpec("mis-reduction", 6, 2, 0, 1)).graph)
    assert s.dag and not s.polytree


@given(st.integers(1, 200), st.integers(0, 20), st.integers(0, 400), st.integers(0, 2**64 - 1))
@settings(max_examples=150, deadline=None)
def test_yes_walk_output_is_yes(n, k, steps, seed):
    t = gen_random_polytree(n, seed)
    try:
        inst = gen_yes_walk(t, k, steps, seed)
    except ValueError:
        return
    assert classify(inst.graph).polytree
    assert decide(inst).yes


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_ts_reduction_preserves_answer(n, seed):
    rng = random.Random(seed)
    g = random_undirected_graph(n, 0.5, rng)
    adj = g.adjacency()
    sets = [s for k in (1, 2) for s in itertools.combinations(range(1, n + 1), k)
            if all(b not in adj[a] for a, b in itertools.combinations(s, 2))]
    a = rng.choice(sets)
    same = [s for s in sets if len(s) == len(a)]
    b = rng.choice(same)
    assert bfs_shortest(reduce_ts_to_oriented(g, a, b)).reachable == undirected_ts_oracle(g, a, b)


@given(st.integers(1, 5), st.integers(1, 2), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_mis_reduction_preserves_answer(n, k, seed):
    if k > n:
        return
    rng = random.Random(seed)
    g = random_undirected_graph(n, 0.5, rng)
    labels = [i % k for i in range(n)]
    rng.shuffle(labels)
    parts = [[v for v in range(1, n + 1) if labels[v - 1] == i] for i in range(k)]
    inst = reduce_mis_to_dag(g, k, parts)
    assert bfs_shortest(inst).reachable == multicolored_is_brute(g, parts)
