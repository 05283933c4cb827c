"""Shared enumerators, strategies and an independent flow oracle.

Nothing here calls the package's flow or solver code, so values computed
from these helpers are independent checks on it.
"""
from __future__ import annotations

import heapq
import itertools
import random
from collections import deque
from pathlib import Path
from typing import Iterator, Sequence

from hypothesis import strategies as st

from dtslide import Digraph, Instance

FIXTURES = Path(__file__).parent / "fixtures"

Arc = tuple[int, int]


def labeled_trees(n: int) -> Iterator[list[Arc]]:
    """Every labelled tree on ``1..n`` (Cayley: n^(n-2) of them) via Prufer codes."""
    if n == 1:
        yield []
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield prufer_edges(seq, n)


def orientations(edges: Sequence[Arc]) -> Iterator[list[Arc]]:
    for bits in range(1 << len(edges)):
        yield [(u, v) if (bits >> i) & 1 else (v, u) for i, (u, v) in enumerate(edges)]


def polytrees(n: int) -> Iterator[list[Arc]]:
    for edges in labeled_trees(n):
        yield from orientations(edges)


def prufer_edges(seq: Sequence[int], n: int) -> list[Arc]:
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


def random_polytree_arcs(n: int, rng: random.Random) -> list[Arc]:
    """Uniform labelled tree (random Prufer code) with uniform orientation."""
    if n == 1:
        return []
    seq = [rng.randrange(1, n + 1) for _ in range(n - 2)]
    return [(u, v) if rng.random() < 0.5 else (v, u) for u, v in prufer_edges(seq, n)]


def adjacency(n: int, arcs: Sequence[Arc]) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n + 1)]
    for u, v in arcs:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def independent_sets(n: int, arcs: Sequence[Arc], k: int) -> list[tuple[int, ...]]:
    adj = adjacency(n, arcs)
    return [s for s in itertools.combinations(range(1, n + 1), k)
            if all(b not in adj[a] for a, b in itertools.combinations(s, 2))]


def cut_flow(n: int, arcs: Sequence[Arc], i0, ir) -> dict[Arc, int]:
    """``|C- & I0| - |C- & Ir|`` per arc, by deleting the arc and searching
    from its tail in the underlying graph."""
    adj = adjacency(n, arcs)
    src, tgt = set(i0), set(ir)
    out = {}
    for u, v in arcs:
        seen = {u}
        queue = deque([u])
        while queue:
            a = queue.popleft()
            for b in adj[a]:
                if (a, b) in ((u, v), (v, u)) or b in seen:
                    continue
                seen.add(b)
                queue.append(b)
        out[(u, v)] = len(seen & src) - len(seen & tgt)
    return out


def instance(n: int, arcs: Sequence[Arc], i0, ir) -> Instance:
    return Instance(Digraph(n, arcs), i0, ir)


@st.composite
def polytree_arcs(draw, min_n: int = 1, max_n: int = 9) -> tuple[int, list[Arc]]:
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return n, random_polytree_arcs(n, random.Random(seed))


@st.composite
def polytree_instances(draw, min_n: int = 1, max_n: int = 9, max_k: int = 3) -> Instance:
    """A random polytree with independent source and target sets of equal size."""
    n, arcs = draw(polytree_arcs(min_n, max_n))
    adj = adjacency(n, arcs)

    def pick(k: int) -> list[int]:
        order = draw(st.permutations(range(1, n + 1)))
        chosen: list[int] = []
        for v in order:
            if len(chosen) < k and all(u not in adj[v] for u in chosen):
                chosen.append(v)
        return chosen

    k = draw(st.integers(0, max_k))
    a = pick(k)
    b = pick(len(a))
    if len(b) < len(a):
        a = a[: len(b)]
    return instance(n, arcs, a, b)


def replay(n: int, arcs: Sequence[Arc], i0, moves) -> set[int] | None:
    """Apply ``moves`` from ``i0``; the final token set, or None on an illegal slide."""
    adj = adjacency(n, arcs)
    arc_set = set(arcs)
    tokens = set(i0)
    for u, v in moves:
        if u not in tokens or (u, v) not in arc_set or v in tokens:
            return None
        tokens.remove(u)
        if adj[v] & tokens:
            return None
        tokens.add(v)
    return tokens


def signed_depth(n: int, arcs: Sequence[Arc], r: int) -> dict[int, int]:
    """Forward minus reverse arc count from ``r``, by search over the underlying tree."""
    step = {}
    for u, v in arcs:
        step[(u, v)] = 1
        step[(v, u)] = -1
    adj = adjacency(n, arcs)
    d = {r: 0}
    stack = [r]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in d:
                d[b] = d[a] + step[(a, b)]
                stack.append(b)
    return d


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter) -> None:
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
