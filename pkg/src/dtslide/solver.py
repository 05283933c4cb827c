"""Linear-time decision procedure for Directed Token Sliding on polyforests."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .flow import (
    ArcFlowTable,
    Kind,
    ReducedInstance,
    SubInstance,
    _blocking_children,
    _reduce,
    _rigid_mask,
    check_nonnegative,
    compute_arc_flow,
    vertex_mask,
)
from .graph import Instance, require_polyforest


class Answer(str, Enum):
    YES = "YES"
    NO = "NO"


class Reason(str, Enum):
    NEGATIVE_FLOW = "negative-flow"
    RIGID_EXCEPTION = "rigid-exception"
    GREEDY_FAILURE = "greedy-failure"
    TOKEN_COUNT_MISMATCH = "token-count-mismatch"
    TRIVIAL_YES = "trivial-yes"


@dataclass(frozen=True)
class MappingPair:
    """``f`` sends each source token to the out-neighbour it enters first,
    ``g`` sends each target to the in-neighbour its token arrives from."""

    f: dict[int, int]
    g: dict[int, int]


@dataclass
class Verdict:
    answer: Answer
    reason: Reason | None = None
    length: int | None = None
    certificate: dict[int, MappingPair] | None = field(default=None, repr=False)

    @property
    def yes(self) -> bool:
        return self.answer is Answer.YES

    def __str__(self) -> str:
        if self.yes:
            return f"YES {self.length}"
        return f"NO {self.reason.value}"


def _assign(red: ReducedInstance, active: np.ndarray, residual: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    """Run the greedy over every piece flagged in ``active`` at once.

    Depth is the BFS depth from the lowest-numbered vertex of the whole
    weakly connected component.  Restricted to one piece this is the depth
    from the piece's topmost vertex plus a constant, so it is a valid
    rooting of every piece, and no second traversal is needed.
    """
    g = red.graph
    comp_of = red.comp_of_a
    n = g.n
    depth = red.flow.forest.depth_a
    inst = red.instance
    roles = []
    for role, tokens in ((0, inst.source_a), (1, inst.target_a)):
        vs = vertex_mask(n, tokens)
        vs &= active[comp_of]
        idx = np.flatnonzero(vs)
        roles.append(idx * 2 + role)
    keys = np.concatenate(roles)
    v = keys // 2
    order = keys[np.lexsort((keys, -depth[v], comp_of[v]))]
    return _kernels.greedy_assign(*g.csr, red.flow.forest.parent_a, comp_of, depth, residual, order)


def _pair(sub: SubInstance, f: np.ndarray, g: np.ndarray) -> MappingPair:
    return MappingPair({v: int(f[v]) for v in sorted(sub.source)}, {v: int(g[v]) for v in sorted(sub.target)})


def greedy_mappings(sub: SubInstance, residual: np.ndarray | None = None) -> MappingPair | None:
    """Deepest-first assignment of first and last steps for every token.

    Tokens are taken by decreasing depth (see :func:`_assign`), then by
    vertex id, with the source role first.  Each picks the deepest
    unclaimed neighbour (lowest id on ties) across an arc with residual flow
    at least one, and uses up one unit of that flow.

    ``residual`` is the flow array of the parent table (indexed by forest
    child) and is decremented in place; a private copy is used when it is
    omitted.  Returns ``None`` when no injective pair along arcs leaves
    every arc flow between the images nonnegative.
    """
    if sub.kind is not Kind.ACTIVE:
        raise ValueError(f"greedy mappings need an active component, got {sub.kind.value}")
    red = sub.parent
    if residual is None:
        residual = red.flow.values.copy()
    active = np.zeros(red.count, np.bool_)
    active[sub.label] = True
    failed, f, g = _assign(red, active, residual)
    return None if failed >= 0 else _pair(sub, f, g)


def sequence_length(w: ArcFlowTable) -> int:
    return w.total()


@dataclass
class Analysis:
    """Everything the decision pipeline computed; reused by the sequence builder."""

    verdict: Verdict
    flow: ArcFlowTable | None = None
    reduced: ReducedInstance | None = None
    mappings: dict[int, MappingPair] = field(default_factory=dict)
    residual: np.ndarray | None = None


def analyse(inst: Instance, certificate: bool = True) -> Analysis:
    """Run the full decision pipeline.

    With ``certificate`` the per-piece mappings and the residual flow left
    after the first and last steps are returned as Python objects for the
    sequence builder.
    """
    g = inst.graph
    forest = require_polyforest(g)
    src, tgt = inst.source, inst.target
    if not src or src == tgt:
        w = compute_arc_flow(g, src, tgt) if src else None
        return Analysis(Verdict(Answer.YES, Reason.TRIVIAL_YES, 0, {}), w)
    if len(forest.roots_a) > 1:
        comp = forest.comp_a
        balance = np.bincount(comp[inst.source_a], minlength=len(forest.roots_a) + 1)
        balance -= np.bincount(comp[inst.target_a], minlength=len(forest.roots_a) + 1)
        if np.any(balance):
            return Analysis(Verdict(Answer.NO, Reason.TOKEN_COUNT_MISMATCH))
    w = compute_arc_flow(g, inst.source_a, inst.target_a)
    if not check_nonnegative(w):
        return Analysis(Verdict(Answer.NO, Reason.NEGATIVE_FLOW), w)
    rigid = _rigid_mask(inst, w)
    pos = w.positive_degrees > 0
    if np.any((rigid[g.tails] & pos[g.heads]) | (rigid[g.heads] & pos[g.tails])):
        return Analysis(Verdict(Answer.NO, Reason.RIGID_EXCEPTION), w)
    red = _reduce(inst, rigid, _blocking_children(w), w)
    residual = w.values.copy()
    failed, f, gm = _assign(red, red.kind_a == 0, residual)
    if failed >= 0:
        return Analysis(Verdict(Answer.NO, Reason.GREEDY_FAILURE), w, red)
    mappings: dict[int, MappingPair] = {}
    if certificate:
        for sub in red.active():
            if sub.source:
                mappings[sub.label] = _pair(sub, f, gm)
    verdict = Verdict(Answer.YES, None, sequence_length(w), mappings if certificate else None)
    return Analysis(verdict, w, red, mappings, residual if certificate else None)


def decide(inst: Instance) -> Verdict:
    """Decide reconfigurability; the verdict carries no certificate."""
    return analyse(inst, certificate=False).verdict
