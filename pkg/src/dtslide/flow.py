"""Arc flow, rigid tokens, blocking arcs and the reduced instance.

The flow of an arc ``e`` is ``|C- & X| - |C- & Y|`` where ``C-`` is the
tail side of the forest after deleting ``e``.  It is computed from one
post-order accumulation over the cached BFS rooting; the tail side is
never materialised.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .graph import Arc, Digraph, GraphError, Instance, InstanceError, RootedForest, require_polyforest


def _vertex_array(vertices: Iterable[int] | np.ndarray) -> np.ndarray:
    """Distinct vertices as an array; arrays are passed through unchanged."""
    if isinstance(vertices, np.ndarray):
        return vertices.astype(np.int64, copy=False)
    vs = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
    return np.fromiter(vs, np.int64, len(vs))


def vertex_mask(n: int, vertices: Iterable[int]) -> np.ndarray:
    mask = np.zeros(n + 1, np.bool_)
    mask[_vertex_array(vertices)] = True
    return mask


class ArcFlowTable:
    """Flow value for every arc of a polyforest.

    ``values[child]`` holds the flow of the arc joining ``child`` to its
    parent in :class:`RootedForest`; entries at roots are zero.
    """

    __slots__ = ("graph", "forest", "values", "_nonzero", "_positive")

    def __init__(self, graph: Digraph, forest: RootedForest, values: np.ndarray) -> None:
        self.graph = graph
        self.forest = forest
        self.values = values
        self._nonzero: np.ndarray | None = None
        self._positive: np.ndarray | None = None

    def __getitem__(self, arc: Arc) -> int:
        u, v = arc
        if not self.graph.has_arc(u, v):
            raise KeyError(arc)
        return int(self.values[self.forest.arc_key(u, v)])

    def __len__(self) -> int:
        return self.graph.m

    def items(self) -> Iterator[tuple[Arc, int]]:
        forest, values = self.forest, self.values.tolist()
        parent = forest.parent
        for v in forest.order:
            if parent[v]:
                yield forest.arc_of(v), values[v]

    def as_dict(self) -> dict[Arc, int]:
        return dict(self.items())

    def total(self) -> int:
        return int(self.values.sum())

    def minimum(self) -> int:
        if self.graph.m == 0:
            return 0
        return int(self.values[self.forest.parent_a > 0].min())

    def _degrees(self) -> None:
        f = self.forest
        self._nonzero, self._positive = _kernels.flow_degrees(f.order_a, f.parent_a, self.values)

    @property
    def nonzero_degrees(self) -> np.ndarray:
        if self._nonzero is None:
            self._degrees()
        return self._nonzero

    @property
    def positive_degrees(self) -> np.ndarray:
        if self._positive is None:
            self._degrees()
        return self._positive

    def nonzero_degree(self, v: int) -> int:
        """Number of arcs in Gamma(v) with nonzero flow."""
        return int(self.nonzero_degrees[v])

    def positive_degree(self, v: int) -> int:
        """Number of arcs in Gamma(v) with positive flow."""
        return int(self.positive_degrees[v])


def compute_arc_flow(t: Digraph, i0: Iterable[int], ir: Iterable[int]) -> ArcFlowTable:
    forest = require_polyforest(t)
    src, tgt = _vertex_array(i0), _vertex_array(ir)
    if len(src) != len(tgt):
        raise InstanceError(f"token sets differ in size ({len(src)} vs {len(tgt)})")
    for arr in (src, tgt):
        if len(arr):
            t.check_vertex(int(arr.min()))
            t.check_vertex(int(arr.max()))
    values = _kernels.arc_flow(forest.order_a, forest.ppos_a, forest.up_pos_a, src, tgt)
    return ArcFlowTable(t, forest, values)


def check_nonnegative(w: ArcFlowTable) -> bool:
    # root entries are zero, so they cannot hide a negative arc
    return int(w.values.min()) >= 0


def _rigid_mask(inst: Instance, w: ArcFlowTable) -> np.ndarray:
    n = inst.graph.n
    both = vertex_mask(n, inst.source_a) & vertex_mask(n, inst.target_a)
    return both & (w.nonzero_degrees == 0)


def rigid_tokens(inst: Instance, w: ArcFlowTable) -> frozenset[int]:
    return frozenset(np.flatnonzero(_rigid_mask(inst, w)).tolist())


def rigid_exception(t: Digraph, r: Iterable[int], w: ArcFlowTable) -> bool:
    """True when some rigid token has a neighbour touching a positive arc."""
    rigid = vertex_mask(t.n, r)
    pos = w.positive_degrees > 0
    return bool(np.any((rigid[t.tails] & pos[t.heads]) | (rigid[t.heads] & pos[t.tails])))


def _blocking_children(w: ArcFlowTable) -> np.ndarray:
    """Forest children whose parent arc is blocking."""
    parent = w.forest.parent_a
    nz = w.nonzero_degrees
    cand = (parent > 0) & (w.values == 1) & (nz == 1)
    cand &= nz[parent] == 1
    return np.flatnonzero(cand)


def blocking_arcs(t: Digraph, w: ArcFlowTable, i0: Iterable[int], ir: Iterable[int]) -> frozenset[Arc]:
    """Arcs of flow one whose endpoints carry no other nonzero flow.

    ``i0``/``ir`` are only used to assert the endpoint memberships that
    follow from the definition.
    """
    src, tgt = set(i0), set(ir)
    out: set[Arc] = set()
    for c in _blocking_children(w).tolist():
        a, b = w.forest.arc_of(c)
        assert a in src and a not in tgt and b in tgt and b not in src
        out.add((a, b))
    return frozenset(out)


class Kind(str, Enum):
    RIGID = "rigid-singleton"
    BLOCKING = "blocking-pair"
    ACTIVE = "active"


_KIND_CODES = (Kind.ACTIVE, Kind.RIGID, Kind.BLOCKING)


@dataclass(eq=False)
class SubInstance:
    """One weakly connected component of the reduced forest."""

    label: int
    kind: Kind
    vertices: tuple[int, ...]
    source: frozenset[int]
    target: frozenset[int]
    parent: ReducedInstance = field(repr=False)

    @property
    def root(self) -> int:
        return self.vertices[0]

    def out_neighbors(self, v: int) -> list[int]:
        comp = self.parent.comp_of
        return [u for u in self.parent.graph.out_neighbors(v) if comp[u] == self.label]

    def in_neighbors(self, v: int) -> list[int]:
        comp = self.parent.comp_of
        return [u for u in self.parent.graph.in_neighbors(v) if comp[u] == self.label]

    def neighbors(self, v: int) -> list[int]:
        return self.out_neighbors(v) + self.in_neighbors(v)

    @property
    def arcs(self) -> list[Arc]:
        return [(v, u) for v in self.vertices for u in self.out_neighbors(v)]

    def flow(self, u: int, v: int) -> int:
        return self.parent.flow[(u, v)]


class ReducedInstance:
    """The forest left after cutting around rigid tokens and blocking arcs.

    Pieces are labelled ``0..count-1`` by smallest member.  ``comp_of_a[v]``
    is the label of the piece holding ``v`` and ``kind_a[label]`` is 0
    (active), 1 (rigid singleton) or 2 (blocking pair).  ``precedence`` holds
    ``(i, j)`` when piece ``i`` must be processed before piece ``j``.  The
    per-piece :class:`SubInstance` views are built on first access.
    """

    def __init__(self, inst: Instance, flow: ArcFlowTable, comp_of: np.ndarray, count: int,
                 kinds: np.ndarray, blocking: np.ndarray, removed: np.ndarray) -> None:
        self.instance = inst
        self.graph = inst.graph
        self.flow = flow
        self.comp_of_a = comp_of
        self.count = count
        self.kind_a = kinds
        self._blocking = blocking
        self._removed = removed
        self._comp_list: list[int] | None = None
        self._components: list[SubInstance] | None = None
        self._precedence: frozenset[tuple[int, int]] | None = None

    @property
    def comp_of(self) -> list[int]:
        if self._comp_list is None:
            self._comp_list = self.comp_of_a.tolist()
        return self._comp_list

    @property
    def removed(self) -> frozenset[Arc]:
        arc_of = self.flow.forest.arc_of
        return frozenset(arc_of(c) for c in np.flatnonzero(self._removed).tolist())

    @property
    def components(self) -> list[SubInstance]:
        if self._components is None:
            members: list[list[int]] = [[] for _ in range(self.count)]
            for v, c in enumerate(self.comp_of[1:], start=1):
                members[c].append(v)
            src, tgt = self.instance.source, self.instance.target
            kinds = self.kind_a.tolist()
            self._components = [
                SubInstance(label, _KIND_CODES[kinds[label]], tuple(block),
                            frozenset(v for v in block if v in src),
                            frozenset(v for v in block if v in tgt), self)
                for label, block in enumerate(members)
            ]
        return self._components

    @property
    def precedence(self) -> frozenset[tuple[int, int]]:
        if self._precedence is None:
            g, comp_of, forest = self.graph, self.comp_of, self.flow.forest
            pairs: set[tuple[int, int]] = set()
            for c in self._blocking.tolist():
                x, y = forest.arc_of(c)
                i = comp_of[c]
                # tail x: the token leaves x before any neighbour of x may be occupied
                for z in g.neighbors(x):
                    if comp_of[z] != i:
                        pairs.add((i, comp_of[z]))
                # head y: neighbours of y settle before the token arrives
                for z in g.neighbors(y):
                    if comp_of[z] != i:
                        pairs.add((comp_of[z], i))
            self._precedence = frozenset(pairs)
        return self._precedence

    def active(self) -> list[SubInstance]:
        return [c for c in self.components if c.kind is Kind.ACTIVE]


def _reduce(inst: Instance, rigid: np.ndarray, blocking: np.ndarray, w: ArcFlowTable) -> ReducedInstance:
    forest = w.forest
    parent = forest.parent_a
    ends = np.zeros(inst.graph.n + 1, np.bool_)
    ends[blocking] = True
    ends[parent[blocking]] = True
    is_block = np.zeros(inst.graph.n + 1, np.bool_)
    is_block[blocking] = True
    touches_end = ends | ends[parent]
    removed = (parent > 0) & (rigid | rigid[parent] | (touches_end & ~is_block))
    comp_of, count = _kernels.label_pieces(forest.order_a, parent, removed)
    kinds = np.zeros(count, np.int64)
    kinds[comp_of[np.flatnonzero(rigid)]] = 1
    kinds[comp_of[blocking]] = 2
    return ReducedInstance(inst, w, comp_of, int(count), kinds, blocking, removed)


def reduce_instance(inst: Instance, r: Iterable[int], b: Iterable[Arc], w: ArcFlowTable) -> ReducedInstance:
    """Cut every arc at a rigid token and every non-blocking arc at an
    endpoint of a blocking arc, then label the remaining pieces."""
    n = inst.graph.n
    rigid = vertex_mask(n, r)
    key = w.forest.arc_key
    blocking = np.array(sorted(key(u, v) for u, v in b), np.int64)
    return _reduce(inst, rigid, blocking, w)


def topological_order(count: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm, smallest available index first.

    Raises :class:`GraphError` on a cycle.
    """
    succ: list[list[int]] = [[] for _ in range(count)]
    indeg = [0] * count
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    heap = [i for i in range(count) if indeg[i] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    if len(order) != count:
        raise GraphError("precedence relation contains a cycle")
    return order
