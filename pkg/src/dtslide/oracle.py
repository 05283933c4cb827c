"""Brute-force ground truth for small instances.

Token sets are encoded as bitmasks (bit ``v`` for vertex ``v``).  Every
search here is exhaustive, so the size caps are hard limits: exceeding one
raises :class:`OracleCapError` instead of truncating.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

from .graph import Arc, Digraph, DTSError, GraphError, Instance, InstanceError, require_polyforest, tree_path

DEFAULT_MAX_N = 24
DEFAULT_MAX_TOKENS = 8


class OracleCapError(DTSError):
    """Instance is larger than the configured brute-force limits."""


@dataclass
class OracleResult:
    reachable: bool
    shortest_length: int | None
    witness: list[Arc] | None
    states_explored: int


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class StateSpace:
    """Independent token sets of a digraph joined by single legal slides."""

    def __init__(self, g: Digraph, *, max_n: int = DEFAULT_MAX_N) -> None:
        if g.n > max_n:
            raise OracleCapError(f"graph has {g.n} vertices, oracle cap is {max_n}")
        self.graph = g
        self.out = [list(g.out_neighbors(v)) for v in range(g.n + 1)]
        self.nbr = [_mask(g.neighbors(v)) for v in range(g.n + 1)]

    def moves(self, state: int) -> Iterable[tuple[int, int, int]]:
        """Yield ``(u, v, next_state)`` for every legal slide."""
        nbr = self.nbr
        for u in _members(state):
            rest = state ^ (1 << u)
            for v in self.out[u]:
                if not (rest >> v) & 1 and not nbr[v] & rest:
                    yield u, v, rest | (1 << v)

    def bfs(self, start: int, goal: int | None = None) -> dict[int, tuple[int, int, int]]:
        """Parent pointers ``state -> (previous, u, v)`` of a BFS from ``start``.

        Stops early once ``goal`` is discovered.
        """
        parents: dict[int, tuple[int, int, int]] = {start: (-1, 0, 0)}
        if start == goal:
            return parents
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for u, v, t in self.moves(s):
                if t not in parents:
                    parents[t] = (s, u, v)
                    if t == goal:
                        return parents
                    queue.append(t)
        return parents


def _check_caps(inst: Instance, max_n: int, max_tokens: int) -> None:
    if inst.graph.n > max_n:
        raise OracleCapError(f"graph has {inst.graph.n} vertices, oracle cap is {max_n}")
    if inst.k > max_tokens:
        raise OracleCapError(f"instance has {inst.k} tokens, oracle cap is {max_tokens}")


def bfs_shortest(inst: Instance, max_n: int = DEFAULT_MAX_N, max_tokens: int = DEFAULT_MAX_TOKENS) -> OracleResult:
    _check_caps(inst, max_n, max_tokens)
    space = StateSpace(inst.graph, max_n=max_n)
    start, goal = _mask(inst.source), _mask(inst.target)
    parents = space.bfs(start, goal)
    if goal not in parents:
        return OracleResult(False, None, None, len(parents))
    witness: list[Arc] = []
    s = goal
    while s != start:
        s, u, v = parents[s]
        witness.append((u, v))
    witness.reverse()
    return OracleResult(True, len(witness), witness, len(parents))


def reachable_sets(g: Digraph, source: Iterable[int], max_n: int = DEFAULT_MAX_N) -> set[frozenset[int]]:
    """Every token set reachable from ``source`` (including itself)."""
    space = StateSpace(g, max_n=max_n)
    return {frozenset(_members(s)) for s in space.bfs(_mask(source))}


def all_sequence_lengths(inst: Instance, max_states: int = 10_000, max_n: int = DEFAULT_MAX_N) -> set[int]:
    """Lengths of every reconfiguration sequence from source to target.

    Exhaustive over all state paths via memoised depth-first search, which
    is exact only when the reachable state graph has no directed cycle; a
    cycle raises :class:`ValueError`.  More than ``max_states`` reachable
    states raises :class:`OracleCapError`.
    """
    space = StateSpace(inst.graph, max_n=max_n)
    start, goal = _mask(inst.source), _mask(inst.target)
    lengths: dict[int, frozenset[int]] = {}
    on_stack: set[int] = set()
    # iterative post-order DFS; each frame is (state, successor iterator, collected lengths)
    stack = [(start, iter([t for _, _, t in space.moves(start)]), set())]
    on_stack.add(start)
    while stack:
        state, succ, acc = stack[-1]
        advanced = False
        for t in succ:
            if t in on_stack:
                raise ValueError("state graph has a directed cycle")
            if t in lengths:
                acc.update(x + 1 for x in lengths[t])
                continue
            if len(lengths) + len(on_stack) >= max_states:
                raise OracleCapError(f"more than {max_states} states")
            on_stack.add(t)
            stack.append((t, iter([x for _, _, x in space.moves(t)]), set()))
            advanced = True
            break
        if advanced:
            continue
        stack.pop()
        on_stack.discard(state)
        if state == goal:
            acc.add(0)
        lengths[state] = frozenset(acc)
        if stack:
            stack[-1][2].update(x + 1 for x in lengths[state])
    return set(lengths[start])


def sequence_lengths_from(g: Digraph, source: Iterable[int], max_states: int = 10_000,
                          max_n: int = DEFAULT_MAX_N) -> dict[frozenset[int], frozenset[int]]:
    """For every token set reachable from ``source``, the lengths of all
    sequences that reach it.

    Built in one pass over the reachable state graph in topological order,
    so every state path is counted.  A directed cycle among reachable states
    raises :class:`ValueError`.
    """
    space = StateSpace(g, max_n=max_n)
    start = _mask(source)
    succ: dict[int, list[int]] = {}
    indeg: dict[int, int] = {start: 0}
    stack = [start]
    while stack:
        s = stack.pop()
        nxt = [t for _, _, t in space.moves(s)]
        succ[s] = nxt
        for t in nxt:
            if t not in indeg:
                if len(indeg) >= max_states:
                    raise OracleCapError(f"more than {max_states} states")
                indeg[t] = 0
                stack.append(t)
            indeg[t] += 1
    lengths: dict[int, set[int]] = {s: set() for s in indeg}
    lengths[start].add(0)
    ready = [s for s, d in indeg.items() if d == 0]
    done = 0
    while ready:
        s = ready.pop()
        done += 1
        step = {x + 1 for x in lengths[s]}
        for t in succ[s]:
            lengths[t] |= step
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    if done != len(indeg):
        raise ValueError("state graph has a directed cycle")
    return {frozenset(_members(s)): frozenset(v) for s, v in lengths.items()}


def _directed_reach(t: Digraph) -> list[int]:
    reach = [0] * (t.n + 1)
    for s in t.vertices():
        seen = 1 << s
        stack = [s]
        while stack:
            v = stack.pop()
            for u in t.out_neighbors(v):
                if not (seen >> u) & 1:
                    seen |= 1 << u
                    stack.append(u)
        reach[s] = seen
    return reach


def matching_exists_brute(t: Digraph, x: Sequence[int], y: Sequence[int], max_size: int = 8) -> bool:
    """Try every bijection from ``x`` to ``y``; both may be multisets."""
    require_polyforest(t)
    x, y = list(x), list(y)
    if len(x) != len(y):
        raise ValueError("x and y differ in size")
    if len(x) > max_size:
        raise OracleCapError(f"{len(x)} endpoints, brute-force cap is {max_size}")
    reach = _directed_reach(t)
    for perm in itertools.permutations(y):
        if all((reach[a] >> b) & 1 for a, b in zip(x, perm)):
            return True
    return False


def path_flow(t: Digraph, x: Sequence[int], y: Sequence[int], bijection: Sequence[int]) -> dict[Arc, int]:
    """Signed count of tree paths ``x[i] -> y[bijection[i]]`` crossing each arc.

    Forward traversals count +1 and reverse traversals -1.
    """
    counts = {arc: 0 for arc in t.arcs}
    for i, j in enumerate(bijection):
        for a, b, forward in tree_path(t, x[i], y[j]).steps:
            if forward:
                counts[(a, b)] += 1
            else:
                counts[(b, a)] -= 1
    return counts


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]) -> None:
        norm = []
        seen = set()
        for u, v in edges:
            if not (0 < u <= n and 0 < v <= n) or u == v:
                raise GraphError(f"bad edge {{{u}, {v}}}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(norm))

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def is_independent(self, s: Iterable[int]) -> bool:
        s = set(s)
        return not any(u in s and v in s for u, v in self.edges)


def undirected_ts_oracle(g: UndirectedGraph, i0: Iterable[int], ir: Iterable[int], max_n: int = 16) -> bool:
    """Token Sliding on an undirected graph, by plain BFS over frozensets."""
    if g.n > max_n:
        raise OracleCapError(f"graph has {g.n} vertices, cap is {max_n}")
    start, goal = frozenset(i0), frozenset(ir)
    if len(start) != len(goal):
        raise InstanceError("token sets differ in size")
    for name, s in (("source", start), ("target", goal)):
        if not all(0 < v <= g.n for v in s) or not g.is_independent(s):
            raise InstanceError(f"{name} is not an independent set")
    adj = g.adjacency()
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if s == goal:
            return True
        for u in s:
            others = s - {u}
            for v in adj[u]:
                if v in s or any(z in others for z in adj[v]):
                    continue
                t = others | {v}
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    return False


def multicolored_is_brute(g: UndirectedGraph, parts: Sequence[Sequence[int]], cap: int = 10**6) -> bool:
    if prod(len(p) for p in parts) > cap:
        raise OracleCapError("too many transversals")
    adj = g.adjacency()
    for choice in itertools.product(*parts):
        if all(choice[j] not in adj[choice[i]] for i in range(len(choice)) for j in range(i + 1, len(choice))):
            return True
    return False
