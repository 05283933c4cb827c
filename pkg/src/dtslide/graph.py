"""Directed graphs, token-sliding instances and structural queries.

Vertices are dense 1-based integers.  Adjacency lists are indexed by vertex
id; slot 0 is unused.  Both :class:`Digraph` and :class:`Instance` are
immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

Arc = tuple[int, int]


class DTSError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(DTSError, ValueError):
    """Malformed graph or a graph of the wrong structural class."""


class InstanceError(DTSError, ValueError):
    """Token sets that do not form a valid instance."""


class Digraph:
    """Simple digraph on vertices ``1..n`` given by an ordered arc list.

    Self-loops and repeated arcs are rejected.  Antiparallel pairs are
    allowed; the polytree pipeline refuses them through :func:`classify`.

    Arcs are stored as two integer arrays (``tails``, ``heads``) plus a CSR
    adjacency.  Python-level adjacency lists, the arc tuple and the arc set
    are built on first use.
    """

    __slots__ = ("n", "tails", "heads", "csr", "_arcs", "_out", "_in", "_arc_set", "_forest")

    def __init__(self, n: int, arcs: Iterable[Arc] | np.ndarray) -> None:
        if n < 0:
            raise GraphError(f"vertex count must be nonnegative, got {n}")
        arr = np.asarray(arcs if isinstance(arcs, np.ndarray) else list(arcs))
        if arr.size == 0:
            arr = np.zeros((0, 2), np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.dtype.kind not in "iu":
            raise GraphError("arcs must be pairs of integers")
        arr = arr.astype(np.int64)
        tails, heads = arr[:, 0].copy(), arr[:, 1].copy()
        bad = np.flatnonzero((tails < 1) | (tails > n) | (heads < 1) | (heads > n))
        if bad.size:
            u, v = int(tails[bad[0]]), int(heads[bad[0]])
            raise GraphError(f"arc ({u}, {v}) has an endpoint outside 1..{n}")
        loops = np.flatnonzero(tails == heads)
        if loops.size:
            raise GraphError(f"self-loop at vertex {int(tails[loops[0]])}")
        keys = tails * (n + 1) + heads
        order = np.argsort(keys, kind="stable")
        dup = np.flatnonzero(keys[order][1:] == keys[order][:-1])
        if dup.size:
            first = int(order[1:][dup].min())
            raise GraphError(f"duplicate arc ({int(tails[first])}, {int(heads[first])})")
        self.n = n
        self.tails = tails
        self.heads = heads
        self.csr = _kernels.build_csr(n, tails, heads)
        self._arcs: tuple[Arc, ...] | None = None
        self._out: list[list[int]] | None = None
        self._in: list[list[int]] | None = None
        self._arc_set: frozenset[Arc] | None = None
        self._forest: RootedForest | None = None

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={list(self.arcs)!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arc_set == other.arc_set

    def __hash__(self) -> int:
        return hash((self.n, self.arc_set))

    @property
    def arcs(self) -> tuple[Arc, ...]:
        if self._arcs is None:
            self._arcs = tuple(zip(self.tails.tolist(), self.heads.tolist()))
        return self._arcs

    @property
    def arc_set(self) -> frozenset[Arc]:
        if self._arc_set is None:
            self._arc_set = frozenset(self.arcs)
        return self._arc_set

    def _lists(self) -> None:
        out_ptr, out_idx, in_ptr, in_idx = self.csr
        for name, ptr, idx in (("_out", out_ptr, out_idx), ("_in", in_ptr, in_idx)):
            p, flat = ptr.tolist(), idx.tolist()
            setattr(self, name, [flat[p[v]:p[v + 1]] for v in range(self.n + 1)])

    @property
    def m(self) -> int:
        return int(self.tails.shape[0])

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def check_vertex(self, v: int) -> None:
        if not 0 < v <= self.n:
            raise GraphError(f"vertex {v} outside 1..{self.n}")

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arc_set

    def out_neighbors(self, v: int) -> list[int]:
        if self._out is None:
            self._lists()
        return self._out[v]

    def in_neighbors(self, v: int) -> list[int]:
        if self._in is None:
            self._lists()
        return self._in[v]

    def neighbors(self, v: int) -> set[int]:
        """Underlying-graph neighbourhood N(v)."""
        return set(self.out_neighbors(v)).union(self.in_neighbors(v))

    def incident_arcs(self, v: int) -> list[Arc]:
        """Gamma(v): all arcs with ``v`` as an endpoint."""
        return [(v, u) for u in self.out_neighbors(v)] + [(u, v) for u in self.in_neighbors(v)]

    def forest(self) -> RootedForest:
        """Breadth-first rooting of the underlying graph (cached)."""
        if self._forest is None:
            self._forest = RootedForest(self)
        return self._forest


class RootedForest:
    """BFS spanning forest of the underlying graph.

    Each weakly connected component is rooted at its lowest-numbered vertex.
    For a non-root vertex ``v``, ``parent[v]`` is its tree parent and
    ``up[v]`` tells whether the joining arc points towards the parent, i.e.
    the arc is ``(v, parent[v])``.  ``acyclic`` is true exactly when the
    underlying multigraph is a forest, so the BFS tree uses every arc.

    The ``*_a`` attributes are the raw arrays; the plain names are list
    copies made on first access for Python-level code.  ``ppos_a`` and
    ``up_pos_a`` describe the same forest by BFS position (see
    :func:`_kernels.root_forest`); ``parent_a``, ``up_a``, ``depth_a`` and
    ``comp_a`` are derived from them on first use.
    """

    def __init__(self, g: Digraph) -> None:
        self.order_a, self.ppos_a, self.up_pos_a, self.roots_a, _ = _kernels.root_forest(g.n, *g.csr)
        self.acyclic = g.m == g.n - len(self.roots_a)
        self._up: np.ndarray | None = None
        self._depth: np.ndarray | None = None
        self._comp: np.ndarray | None = None
        self._parent: np.ndarray | None = None
        self._lists: dict[str, list] = {}

    @property
    def up_a(self) -> np.ndarray:
        if self._up is None:
            self._up = _kernels.scatter_up(self.order_a, self.up_pos_a)
        return self._up

    @property
    def depth_a(self) -> np.ndarray:
        if self._depth is None:
            self._depth = _kernels.forest_depths(self.order_a, self.ppos_a)
        return self._depth

    @property
    def parent_a(self) -> np.ndarray:
        if self._parent is None:
            self._parent = _kernels.forest_parents(self.order_a, self.ppos_a)
        return self._parent

    @property
    def comp_a(self) -> np.ndarray:
        if self._comp is None:
            self._comp = _kernels.forest_components(self.order_a, self.ppos_a)
        return self._comp

    def _list(self, name: str) -> list:
        if name not in self._lists:
            self._lists[name] = getattr(self, name + "_a").tolist()
        return self._lists[name]

    order = property(lambda self: self._list("order"))
    parent = property(lambda self: self._list("parent"))
    up = property(lambda self: self._list("up"))
    depth = property(lambda self: self._list("depth"))
    comp = property(lambda self: self._list("comp"))
    roots = property(lambda self: self._list("roots"))

    def arc_key(self, u: int, v: int) -> int:
        """Child endpoint of the tree edge joining ``u`` and ``v``."""
        parent = self.parent
        if parent[u] == v:
            return u
        if parent[v] == u:
            return v
        raise GraphError(f"({u}, {v}) is not an edge of the forest")

    def arc_of(self, child: int) -> Arc:
        p = self.parent[child]
        return (child, p) if self.up[child] else (p, child)


@dataclass(frozen=True)
class Structure:
    polytree: bool
    polyforest: bool
    dag: bool
    oriented: bool

    @property
    def flags(self) -> frozenset[str]:
        names = {name for name in ("polytree", "polyforest", "dag", "oriented")
                 if getattr(self, name)}
        return frozenset(names or {"general"})


def underlying_adjacent(g: Digraph, u: int, v: int) -> bool:
    g.check_vertex(u)
    g.check_vertex(v)
    return g.has_arc(u, v) or g.has_arc(v, u)


def is_independent(g: Digraph, s: Iterable[int]) -> bool:
    members = set(s)
    for v in members:
        g.check_vertex(v)
    if len(members) < 64:
        return not any(u in members for v in members for u in g.out_neighbors(v))
    mask = np.zeros(g.n + 1, np.bool_)
    mask[np.fromiter(members, np.int64, len(members))] = True
    return not np.any(mask[g.tails] & mask[g.heads])


def _is_acyclic(g: Digraph) -> bool:
    indeg = [len(g.in_neighbors(v)) for v in range(g.n + 1)]
    stack = [v for v in g.vertices() if indeg[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for u in g.out_neighbors(v):
            indeg[u] -= 1
            if indeg[u] == 0:
                stack.append(u)
    return seen == g.n


def classify(g: Digraph) -> Structure:
    arc_set = g.arc_set
    oriented = not any((v, u) in arc_set for u, v in g.arcs)
    forest = g.forest()
    # m == n - c rules out cycles and antiparallel pairs in the underlying multigraph
    polyforest = forest.acyclic
    polytree = polyforest and len(forest.roots) == 1
    dag = polyforest or _is_acyclic(g)
    return Structure(polytree=polytree, polyforest=polyforest, dag=dag, oriented=oriented)


def require_polyforest(g: Digraph) -> RootedForest:
    forest = g.forest()
    if not forest.acyclic:
        raise GraphError("underlying graph is not a forest")
    return forest


@dataclass(frozen=True)
class TreeWalk:
    """The unique underlying path between two vertices of a polyforest.

    ``steps`` lists ``(a, b, forward)`` for each traversed edge in walk
    order; ``forward`` is true when the arc is ``(a, b)``.
    """

    steps: tuple[tuple[int, int, bool], ...]

    @property
    def fwd(self) -> int:
        return sum(1 for _, _, f in self.steps if f)

    @property
    def rev(self) -> int:
        return len(self.steps) - self.fwd

    @property
    def is_directed(self) -> bool:
        return all(f for _, _, f in self.steps)

    def vertices(self) -> list[int]:
        if not self.steps:
            return []
        return [self.steps[0][0]] + [b for _, b, _ in self.steps]

    def reversed(self) -> TreeWalk:
        return TreeWalk(tuple((b, a, not f) for a, b, f in reversed(self.steps)))


def tree_path(g: Digraph, u: int, v: int) -> TreeWalk:
    forest = require_polyforest(g)
    g.check_vertex(u)
    g.check_vertex(v)
    if forest.comp[u] != forest.comp[v]:
        raise GraphError(f"vertices {u} and {v} lie in different components")
    parent, depth = forest.parent, forest.depth
    left: list[int] = [u]
    right: list[int] = [v]
    a, b = u, v
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a = parent[a]
        b = parent[b]
        left.append(a)
        right.append(b)
    walk = left + right[-2::-1]
    return TreeWalk(tuple((x, y, g.has_arc(x, y)) for x, y in zip(walk, walk[1:])))


class DisjointSet:
    """Union-find over ``0..size-1`` with path halving and union by size."""

    def __init__(self, size: int) -> None:
        self._parent = list(range(size))
        self._size = [1] * size

    def find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return True


def components(g: Digraph, arcs: Iterable[Arc] | None = None) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by smallest member.

    ``arcs`` restricts the edge set (default: all arcs of ``g``).
    """
    ds = DisjointSet(g.n + 1)
    for u, v in g.arcs if arcs is None else arcs:
        ds.union(u, v)
    blocks: dict[int, list[int]] = {}
    for v in g.vertices():
        blocks.setdefault(ds.find(v), []).append(v)
    return list(blocks.values())


@dataclass(frozen=True)
class Instance:
    """A Directed Token Sliding instance (graph, source set, target set).

    ``source_a`` and ``target_a`` hold the same sets as sorted arrays.
    """

    graph: Digraph
    source: frozenset[int]
    target: frozenset[int]

    def __init__(self, graph: Digraph, source: Iterable[int], target: Iterable[int]) -> None:
        source_list = list(source)
        target_list = list(target)
        src, tgt = frozenset(source_list), frozenset(target_list)
        if len(src) != len(source_list) or len(tgt) != len(target_list):
            raise InstanceError("token sets must not repeat a vertex")
        if len(src) != len(tgt):
            raise InstanceError(f"source has {len(src)} tokens but target has {len(tgt)}")
        for name, s in (("source", src), ("target", tgt)):
            for v in s:
                if not 0 < v <= graph.n:
                    raise InstanceError(f"{name} vertex {v} outside 1..{graph.n}")
            if not is_independent(graph, s):
                raise InstanceError(f"{name} is not an independent set")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        # sorted array copies for the numeric kernels
        object.__setattr__(self, "source_a", np.sort(np.array(source_list, np.int64).reshape(-1)))
        object.__setattr__(self, "target_a", np.sort(np.array(target_list, np.int64).reshape(-1)))

    @property
    def k(self) -> int:
        return len(self.source)

    def relabel(self, perm: Sequence[int]) -> Instance:
        """Rename vertex ``v`` to ``perm[v]`` (``perm[0]`` is ignored)."""
        g = Digraph(self.graph.n, [(perm[u], perm[v]) for u, v in self.graph.arcs])
        return Instance(g, [perm[v] for v in self.source], [perm[v] for v in self.target])
