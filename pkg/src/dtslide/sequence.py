"""Shortest reconfiguration sequences on polyforests, plus a sequence checker.

A yes-instance is turned into moves component by component.  Inside an
active component the inner matching between ``f(I0)`` and ``g(Ir)`` is grown
one path at a time, always starting from the unmatched source of least
potential and ending at the reachable sink of least potential.  That choice
rules out weakly biased pairs, so after extending each path by its first and
last step the paths can be executed whole, one after another, in an order
taken from the touch-precedence graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from . import _kernels
from .flow import ReducedInstance, SubInstance, compute_arc_flow, topological_order
from .graph import Arc, Digraph, DTSError, GraphError, Instance
from .solver import MappingPair, analyse

View = Union[Digraph, SubInstance]


class NotReconfigurable(DTSError):
    """Raised when a sequence is requested for a no-instance."""


def _host(view: View) -> Digraph:
    return view.parent.graph if isinstance(view, SubInstance) else view


def _contains(view: View, v: int) -> bool:
    if isinstance(view, SubInstance):
        return 0 < v < len(view.parent.comp_of) and view.parent.comp_of[v] == view.label
    return 0 < v <= view.n


def compute_potential(t: View, r: int) -> dict[int, int]:
    """Forward-minus-reverse arc count along the tree path from ``r``.

    Covers the component of ``r``.  Every arc ``(u, v)`` satisfies
    ``d[v] == d[u] + 1``.
    """
    if not _contains(t, r):
        raise GraphError(f"reference vertex {r} is not in the component")
    d = {r: 0}
    queue = [r]
    for v in queue:
        dv = d[v]
        for u in t.out_neighbors(v):
            if u not in d:
                d[u] = dv + 1
                queue.append(u)
        for u in t.in_neighbors(v):
            if u not in d:
                d[u] = dv - 1
                queue.append(u)
    return d


@dataclass(frozen=True)
class DirectedPath:
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def sink(self) -> int:
        return self.vertices[-1]

    @property
    def second(self) -> int:
        if len(self.vertices) < 3:
            raise ValueError("s' is defined only for paths of length at least 2")
        return self.vertices[1]

    @property
    def second_to_last(self) -> int:
        if len(self.vertices) < 3:
            raise ValueError("t' is defined only for paths of length at least 2")
        return self.vertices[-2]

    def arcs(self) -> list[Arc]:
        return list(zip(self.vertices, self.vertices[1:]))

    def is_valid(self, g: Digraph) -> bool:
        return len(set(self.vertices)) == len(self.vertices) and all(g.has_arc(u, v) for u, v in self.arcs())


PathMatching = list[DirectedPath]


def _view_filter(view: View) -> tuple[np.ndarray, int]:
    if isinstance(view, SubInstance):
        return view.parent.comp_of_a, view.label
    return np.zeros(1, np.int64), -1


def _potential_array(view: View, potential: dict[int, int] | None) -> np.ndarray:
    g = _host(view)
    if potential is None:
        f = g.forest()
        return _kernels.forest_potential(f.order_a, f.ppos_a, f.up_pos_a)
    d = np.zeros(g.n + 1, np.int64)
    for v, x in potential.items():
        d[v] = x
    return d


def _split(flat: np.ndarray, offsets: np.ndarray) -> PathMatching:
    vs, off = flat.tolist(), offsets.tolist()
    return [DirectedPath(tuple(vs[off[i]:off[i + 1]])) for i in range(len(off) - 1)]


def _flatten(paths: Sequence[DirectedPath]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(paths) + 1, np.int64)
    offsets[1:] = np.cumsum([len(p.vertices) for p in paths])
    flat = np.fromiter((v for p in paths for v in p.vertices), np.int64, int(offsets[-1]))
    return flat, offsets


def build_path_matching(
    view: View,
    x: Iterable[int],
    y: Iterable[int],
    residual: np.ndarray | None = None,
    potential: dict[int, int] | None = None,
) -> PathMatching:
    """Directed path matching from ``x`` to ``y`` with no weakly biased pair.

    Paths are grown one at a time from the unmatched source of least
    potential to the reachable sink of least potential (ties by id).
    ``residual`` must hold ``w(e; x, y)`` indexed like
    :attr:`ArcFlowTable.values`; it is consumed in place.  When omitted it is
    computed from ``x`` and ``y``.  ``potential`` defaults to the potential
    from each component root, which orders vertices the same way as the
    potential from any other vertex of the component.
    """
    g = _host(view)
    xs, ys = sorted(set(x)), set(y)
    if len(xs) != len(ys):
        raise ValueError("matching endpoints differ in size")
    forest = g.forest()
    if residual is None:
        residual = compute_arc_flow(g, xs, ys).values.copy()
    comp_of, label = _view_filter(view)
    sinks = np.zeros(g.n + 1, np.bool_)
    sinks[list(ys)] = True
    status, flat, offsets = _kernels.match_paths(
        g.csr[0], g.csr[1], comp_of, label, forest.parent_a, residual,
        _potential_array(view, potential), np.array(xs, np.int64), sinks,
    )
    if status < 0:
        raise RuntimeError(f"no sink reachable from {-status} over positive residual arcs")
    if status > 0:
        raise RuntimeError("matching left residual flow on a used arc")
    return _split(flat, offsets)


def extend_paths(m: PathMatching, fg: MappingPair) -> PathMatching:
    """Prepend each path's source token and append its target token."""
    f_inv = {v: s for s, v in fg.f.items()}
    g_inv = {v: t for t, v in fg.g.items()}
    if {p.source for p in m} != set(f_inv) or {p.sink for p in m} != set(g_inv):
        raise ValueError("path endpoints do not match the images of f and g")
    return [DirectedPath((f_inv[p.source],) + p.vertices + (g_inv[p.sink],)) for p in m]


def _schedule(flat: np.ndarray, offsets: np.ndarray, view: View) -> np.ndarray:
    g = _host(view)
    comp_of, label = _view_filter(view)
    order = _kernels.touch_schedule(flat, offsets, g.n + 1, *g.csr, comp_of, label)
    if len(order) != len(offsets) - 1:
        raise GraphError("path precedence relation contains a cycle")
    return order


def path_schedule(paths: Sequence[DirectedPath], view: View) -> list[int]:
    """Order (0-based indices) in which to run the paths whole.

    Path ``j`` must run before path ``i`` when the start of ``j`` touches
    ``i`` or the end of ``i`` touches ``j``, where a vertex touches a path
    when its closed neighbourhood meets the path.  Ties go to the lower
    index.
    """
    if not paths:
        return []
    return _schedule(*_flatten(paths), view).tolist()


def component_schedule(red: ReducedInstance) -> list[int]:
    return topological_order(len(red.components), red.precedence)


class ReconfigSequence:
    """Moves ``(u, v)`` in execution order, stored as an ``L x 2`` array."""

    __slots__ = ("array", "_moves")

    def __init__(self, moves: Iterable[Arc] | np.ndarray) -> None:
        if isinstance(moves, np.ndarray) and moves.dtype.kind == "i":
            arr = moves
        else:
            arr = np.asarray(list(moves), np.int64)
        self.array = arr.reshape(-1, 2)
        self._moves: list[Arc] | None = None

    @property
    def moves(self) -> list[Arc]:
        if self._moves is None:
            self._moves = list(zip(self.array[:, 0].tolist(), self.array[:, 1].tolist()))
        return self._moves

    def __len__(self) -> int:
        return int(self.array.shape[0])

    def __iter__(self) -> Iterator[Arc]:
        return iter(self.moves)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ReconfigSequence):
            return np.array_equal(self.array, other.array)
        return NotImplemented

    def __repr__(self) -> str:
        return f"ReconfigSequence({self.moves!r})"


def _extend_flat(flat: np.ndarray, offsets: np.ndarray, fg: MappingPair) -> tuple[np.ndarray, np.ndarray]:
    f_inv = {v: s for s, v in fg.f.items()}
    g_inv = {v: t for t, v in fg.g.items()}
    k = len(offsets) - 1
    starts = flat[offsets[:-1]].tolist()
    ends = flat[offsets[1:] - 1].tolist()
    if set(starts) != set(f_inv) or set(ends) != set(g_inv):
        raise ValueError("path endpoints do not match the images of f and g")
    new_off = offsets + 2 * np.arange(k + 1)
    out = np.empty(len(flat) + 2 * k, flat.dtype)
    body = np.ones(len(out), np.bool_)
    body[new_off[:-1]] = False
    body[new_off[1:] - 1] = False
    out[body] = flat
    out[new_off[:-1]] = [f_inv[v] for v in starts]
    out[new_off[1:] - 1] = [g_inv[v] for v in ends]
    return out, new_off


def _component_moves(sub: SubInstance, fg: MappingPair, residual: np.ndarray) -> np.ndarray:
    g = sub.parent.graph
    forest = g.forest()
    xs = np.array(sorted(fg.f.values()), np.int64)
    sinks = np.zeros(g.n + 1, np.bool_)
    sinks[list(fg.g.values())] = True
    d = _kernels.forest_potential(forest.order_a, forest.ppos_a, forest.up_pos_a)
    status, flat, offsets = _kernels.match_paths(
        g.csr[0], g.csr[1], sub.parent.comp_of_a, sub.label, forest.parent_a, residual, d, xs, sinks,
    )
    if status:
        raise RuntimeError(f"inner matching failed in component {sub.label} (status {status})")
    flat, offsets = _extend_flat(flat, offsets, fg)
    return _kernels.gather_moves(flat, offsets, _schedule(flat, offsets, sub))


def component_paths(sub: SubInstance, fg: MappingPair, residual: np.ndarray) -> PathMatching:
    """Full token paths for one active component, in execution order."""
    inner = build_path_matching(sub, fg.f.values(), fg.g.values(), residual)
    full = extend_paths(inner, fg)
    return [full[i] for i in path_schedule(full, sub)]


def build_sequence(inst: Instance) -> ReconfigSequence:
    """A shortest (indeed every) reconfiguration sequence of a yes-instance.

    Raises :class:`NotReconfigurable` on a no-instance.
    """
    result = analyse(inst)
    if not result.verdict.yes:
        raise NotReconfigurable(str(result.verdict))
    red = result.reduced
    if red is None:
        return ReconfigSequence(np.zeros((0, 2), np.int64))
    residual = result.residual
    blocks: list[np.ndarray] = []
    for label in component_schedule(red):
        kind = red.kind_a[label]
        if kind == 2:
            sub = red.components[label]
            (a,), (b,) = sub.source, sub.target
            blocks.append(np.array([[a, b]], np.int64))
        elif kind == 0 and label in result.mappings:
            blocks.append(_component_moves(red.components[label], result.mappings[label], residual))
    if not blocks:
        return ReconfigSequence(np.zeros((0, 2), np.int64))
    return ReconfigSequence(blocks[0] if len(blocks) == 1 else np.concatenate(blocks))


@dataclass(frozen=True)
class Violation:
    step: int
    reason: str

    def __str__(self) -> str:
        return f"INVALID {self.step} {self.reason}"


def check_sequence(inst: Instance, moves: Iterable[Arc]) -> Violation | None:
    """First failing step (1-based) of ``moves`` applied to the source set."""
    g = inst.graph
    occupied = bytearray(g.n + 1)
    for v in inst.source:
        occupied[v] = 1
    step = 0
    for step, (u, v) in enumerate(moves, start=1):
        if not (0 < u <= g.n and 0 < v <= g.n):
            return Violation(step, "vertex-out-of-range")
        if not occupied[u]:
            return Violation(step, "token-not-present")
        if not g.has_arc(u, v):
            return Violation(step, "not-an-arc")
        if occupied[v]:
            return Violation(step, "target-occupied")
        occupied[u] = 0
        for z in g.out_neighbors(v):
            if occupied[z]:
                return Violation(step, "not-independent")
        for z in g.in_neighbors(v):
            if occupied[z]:
                return Violation(step, "not-independent")
        occupied[v] = 1
    final = {v for v in range(1, g.n + 1) if occupied[v]}
    if final != inst.target:
        return Violation(step + 1, "wrong-final-set")
    return None


def verify_sequence(inst: Instance, seq: Iterable[Arc]) -> bool:
    return check_sequence(inst, seq) is None
