"""Instance generators: hardness reductions, random polytrees, yes-walks.

Randomness comes from :class:`random.Random` (CPython's MT19937) seeded with
the 64-bit two's-complement pattern of the given integer, so ``-1`` and
``2**64 - 1`` name the same stream.  Draws use only ``randrange``,
``random`` and ``shuffle``, so a seed and a generator family fully
determine the output on any CPython 3.10+.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Arc, Digraph, Instance, InstanceError
from .oracle import UndirectedGraph

SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> random.Random:
    return random.Random(seed & SEED_MASK)


FAMILIES = ("random-polytree", "yes-walk", "quad-path", "ts-reduction", "mis-reduction")


def reduce_ts_to_oriented(g: UndirectedGraph, i0: Iterable[int], ir: Iterable[int]) -> Instance:
    """Oriented-graph instance equivalent to undirected Token Sliding on ``g``.

    Vertex ``v`` becomes the pair ``v`` (first copy) and ``v + n`` (second
    copy); tokens sit on first copies.
    """
    i0, ir = list(i0), list(ir)
    if len(set(i0)) != len(set(ir)):
        raise InstanceError("token sets differ in size")
    for name, s in (("source", i0), ("target", ir)):
        if not all(0 < v <= g.n for v in s) or not g.is_independent(s):
            raise InstanceError(f"{name} is not an independent set of the input graph")
    n = g.n
    arcs: list[Arc] = [(v, v + n) for v in range(1, n + 1)]
    for u, v in g.edges:
        arcs += [(u, v), (v, u + n), (u + n, v + n), (v + n, u)]
    return Instance(Digraph(2 * n, arcs), i0, ir)


def reduce_mis_to_dag(g: UndirectedGraph, k: int, parts: Sequence[Sequence[int]]) -> Instance:
    """DAG instance that is a yes-instance iff ``g`` has a multicolored
    independent set with respect to ``parts``.

    Layout: ``u_i = i`` for ``i in 1..k+1``, graph vertex ``v`` becomes
    ``k + 1 + v``, and ``w_i = k + 1 + n + i``.  Edges inside ``g`` point from
    the lower block to the higher block, and by ascending id within a block.
    """
    if len(parts) != k:
        raise ValueError(f"expected {k} parts, got {len(parts)}")
    block = [0] * (g.n + 1)
    for i, p in enumerate(parts, start=1):
        for v in p:
            if not 0 < v <= g.n or block[v]:
                raise ValueError("parts do not partition the vertex set")
            block[v] = i
    if not all(block[1:]):
        raise ValueError("parts do not partition the vertex set")
    n = g.n
    u = lambda i: i  # noqa: E731
    vert = lambda v: k + 1 + v  # noqa: E731
    w = lambda i: k + 1 + n + i  # noqa: E731
    arcs: list[Arc] = [(u(i), w(j)) for i in range(1, k + 2) for j in range(1, k + 2)]
    for v in range(1, n + 1):
        arcs.append((u(block[v]), vert(v)))
        arcs.append((vert(v), w(block[v])))
    for a, b in g.edges:
        if (block[a], a) > (block[b], b):
            a, b = b, a
        arcs.append((vert(a), vert(b)))
    total = n + 2 * (k + 1)
    return Instance(Digraph(total, arcs), [u(i) for i in range(1, k + 2)], [w(i) for i in range(1, k + 2)])


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    if n == 1:
        return []
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def gen_random_polytree(n: int, seed: int) -> Digraph:
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(seed)
    seq = [rng.randrange(1, n + 1) for _ in range(n - 2)]
    arcs = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in prufer_decode(seq, n)]
    return Digraph(n, arcs)


def random_independent_set(g: Digraph, k: int, rng: random.Random, attempts: int = 100) -> list[int]:
    """Greedy random independent set of size ``k``; raises after ``attempts``."""
    if k == 0:
        return []
    order = list(g.vertices())
    for _ in range(attempts):
        rng.shuffle(order)
        chosen: list[int] = []
        blocked: set[int] = set()
        for v in order:
            if v not in blocked:
                chosen.append(v)
                blocked.add(v)
                blocked.update(g.out_neighbors(v))
                blocked.update(g.in_neighbors(v))
                if len(chosen) == k:
                    return chosen
    raise InstanceError(f"could not place {k} independent tokens in {attempts} attempts")


def gen_yes_walk(t: Digraph, k: int, steps: int, seed: int, retries: int = 32) -> Instance:
    """Source is a random independent set; target is where ``steps`` random
    legal slides take it.  A step whose sampled slides are all illegal after
    ``retries`` draws is skipped."""
    rng = make_rng(seed)
    source = random_independent_set(t, k, rng)
    tokens = source[:]
    occupied = bytearray(t.n + 1)
    for v in tokens:
        occupied[v] = 1
    for _ in range(steps if tokens else 0):
        for _ in range(retries):
            i = rng.randrange(len(tokens))
            u = tokens[i]
            outs = t.out_neighbors(u)
            if not outs:
                continue
            v = outs[rng.randrange(len(outs))]
            if occupied[v]:
                continue
            if any(occupied[z] and z != u for z in t.out_neighbors(v)) or any(
                occupied[z] and z != u for z in t.in_neighbors(v)
            ):
                continue
            occupied[u] = 0
            occupied[v] = 1
            tokens[i] = v
            break
    return Instance(t, source, tokens)


def gen_quad_path(n: int, k: int) -> Instance:
    """Directed path ``1 -> ... -> n``, tokens on odd vertices ``1..2k-1``
    moving to ``n-2k+2, n-2k+4, ..., n``; every sequence has ``k(n-2k+1)`` moves."""
    if k < 0 or n < 1 or 2 * k - 1 > n - 2 * k + 2:
        raise ValueError(f"n={n} is too small for k={k} tokens")
    g = Digraph(n, [(v, v + 1) for v in range(1, n)])
    return Instance(g, range(1, 2 * k, 2), range(n - 2 * k + 2, n + 1, 2))


def random_undirected_graph(n: int, p: float, rng: random.Random) -> UndirectedGraph:
    return UndirectedGraph(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p])


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    k: int = 1
    steps: int = 0
    seed: int = 0


def generate(spec: GenSpec) -> Instance:
    """Build the instance described by ``spec``.

    ``random-polytree`` places independent source and target sets at
    random; ``ts-reduction`` and ``mis-reduction`` start from a random
    ``G(n, 1/2)`` graph.
    """
    rng = make_rng(spec.seed)
    if spec.family == "random-polytree":
        t = gen_random_polytree(spec.n, spec.seed)
        return Instance(t, random_independent_set(t, spec.k, rng), random_independent_set(t, spec.k, rng))
    if spec.family == "yes-walk":
        t = gen_random_polytree(spec.n, spec.seed)
        return gen_yes_walk(t, spec.k, spec.steps, spec.seed)
    if spec.family == "quad-path":
        return gen_quad_path(spec.n, spec.k)
    if spec.family == "ts-reduction":
        g = random_undirected_graph(spec.n, 0.5, rng)
        d = Digraph(g.n, g.edges)
        return reduce_ts_to_oriented(g, random_independent_set(d, spec.k, rng), random_independent_set(d, spec.k, rng))
    if spec.family == "mis-reduction":
        if not 0 < spec.k <= spec.n:
            raise ValueError("mis-reduction needs 1 <= k <= n")
        g = random_undirected_graph(spec.n, 0.5, rng)
        labels = [i % spec.k for i in range(spec.n)]
        rng.shuffle(labels)
        parts = [[v for v in range(1, spec.n + 1) if labels[v - 1] == i] for i in range(spec.k)]
        return reduce_mis_to_dag(g, spec.k, parts)
    raise ValueError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")
