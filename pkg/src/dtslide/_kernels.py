"""Compiled linear-time passes over array-backed graphs.

All arrays are indexed by vertex id (slot 0 unused) unless noted.  Tree
edges of a rooted forest are keyed by their child endpoint.  The functions
are compiled with numba on first use and cached on disk.
"""
from __future__ import annotations

import heapq

import numpy as np
from numba import njit

# vertex ids, offsets and flows all fit in 32 bits for n < 2**31; the smaller
# footprint matters more than anything else once arrays leave the cache
IDX = np.int32


@njit(cache=True)
def build_csr(n, tails, heads):
    """Out- and in-adjacency in CSR form, each list in arc input order."""
    m = tails.shape[0]
    out_ptr = np.zeros(n + 2, IDX)
    in_ptr = np.zeros(n + 2, IDX)
    for i in range(m):
        out_ptr[tails[i] + 1] += 1
        in_ptr[heads[i] + 1] += 1
    for v in range(1, n + 2):
        out_ptr[v] += out_ptr[v - 1]
        in_ptr[v] += in_ptr[v - 1]
    out_idx = np.empty(m, IDX)
    in_idx = np.empty(m, IDX)
    out_fill = out_ptr[:-1].copy()
    in_fill = in_ptr[:-1].copy()
    for i in range(m):
        u = tails[i]
        v = heads[i]
        out_idx[out_fill[u]] = v
        out_fill[u] += 1
        in_idx[in_fill[v]] = u
        in_fill[v] += 1
    return out_ptr, out_idx, in_ptr, in_idx


# lookahead distances (queue positions) for the early adjacency loads
_AHEAD_PTR = 32
_AHEAD_IDX = 16


@njit(cache=True)
def root_forest(n, out_ptr, out_idx, in_ptr, in_idx):
    """BFS rooting of the underlying graph, one root per component (its
    lowest-numbered vertex).

    Returns per BFS position ``i``: ``order[i]``, the vertex; ``ppos[i]``,
    the position of its parent (-1 at a root); and ``up_p[i]``, whether the
    joining arc points towards the parent.  Parent positions never decrease
    along the order, so passes over these arrays stream through memory.
    Visited vertices are tracked in a bitmap small enough to stay cached.

    The queue is known a few positions ahead, so the adjacency of upcoming
    vertices is loaded early; on graphs larger than the cache this overlaps
    the memory latency that otherwise dominates.  The loaded values only
    feed a checksum, which is returned so the loads are kept.
    """
    order = np.empty(n, IDX)
    ppos = np.empty(n, IDX)
    up_p = np.zeros(n, np.bool_)
    seen = np.zeros((n >> 6) + 1, np.uint64)
    roots = np.empty(n, IDX)
    nroots = 0
    tail = 0
    one = np.uint64(1)
    m = out_idx.shape[0]
    touch = 0
    for r in range(1, n + 1):
        if seen[r >> 6] & (one << np.uint64(r & 63)):
            continue
        roots[nroots] = r
        nroots += 1
        seen[r >> 6] |= one << np.uint64(r & 63)
        order[tail] = r
        ppos[tail] = -1
        head = tail
        tail += 1
        while head < tail:
            if head + _AHEAD_PTR < tail:
                x = order[head + _AHEAD_PTR]
                touch += out_ptr[x] + in_ptr[x]
            if head + _AHEAD_IDX < tail:
                x = order[head + _AHEAD_IDX]
                a = out_ptr[x]
                b = in_ptr[x]
                if a < m:
                    touch += out_idx[a]
                if b < m:
                    touch += in_idx[b]
            v = order[head]
            for i in range(out_ptr[v], out_ptr[v + 1]):
                u = out_idx[i]
                bit = one << np.uint64(u & 63)
                if not seen[u >> 6] & bit:
                    seen[u >> 6] |= bit
                    order[tail] = u
                    ppos[tail] = head
                    tail += 1
            for i in range(in_ptr[v], in_ptr[v + 1]):
                u = in_idx[i]
                bit = one << np.uint64(u & 63)
                if not seen[u >> 6] & bit:
                    seen[u >> 6] |= bit
                    order[tail] = u
                    ppos[tail] = head
                    up_p[tail] = True
                    tail += 1
            head += 1
    return order, ppos, up_p, roots[:nroots].copy(), touch


@njit(cache=True)
def forest_parents(order, ppos):
    """Vertex-indexed parent, 0 at roots."""
    parent = np.zeros(order.shape[0] + 1, IDX)
    for i in range(order.shape[0]):
        if ppos[i] >= 0:
            parent[order[i]] = order[ppos[i]]
    return parent


@njit(cache=True)
def forest_components(order, ppos):
    """Component label (from 1) of every vertex, in BFS-root order."""
    n = order.shape[0]
    cp = np.empty(n, IDX)
    comp = np.zeros(n + 1, IDX)
    label = 0
    for i in range(n):
        if ppos[i] < 0:
            label += 1
            cp[i] = label
        else:
            cp[i] = cp[ppos[i]]
        comp[order[i]] = cp[i]
    return comp


@njit(cache=True)
def scatter_up(order, up_p):
    up = np.zeros(order.shape[0] + 1, np.bool_)
    for i in range(order.shape[0]):
        up[order[i]] = up_p[i]
    return up


@njit(cache=True)
def forest_depths(order, ppos):
    """BFS depth of every vertex, from one streaming pass over positions."""
    n = order.shape[0]
    dp = np.zeros(n, IDX)
    depth = np.zeros(n + 1, IDX)
    for i in range(n):
        if ppos[i] >= 0:
            dp[i] = dp[ppos[i]] + 1
        depth[order[i]] = dp[i]
    return depth


@njit(cache=True)
def arc_flow(order, ppos, up_p, src, tgt):
    """Tail-side surplus of every tree edge, indexed by child vertex.

    Each vertex counts +1 per occurrence in ``src`` and -1 per occurrence
    in ``tgt``.  An upward edge's tail side is the child subtree; a
    downward edge's tail side is the rest of the component.  The subtree
    sums run over BFS positions.
    """
    n = order.shape[0]
    diff = np.zeros(n + 1, IDX)
    for i in range(src.shape[0]):
        diff[src[i]] += 1
    for i in range(tgt.shape[0]):
        diff[tgt[i]] -= 1
    sub = np.empty(n, IDX)
    for i in range(n):
        sub[i] = diff[order[i]]
    for i in range(n - 1, -1, -1):
        p = ppos[i]
        if p >= 0:
            sub[p] += sub[i]
    values = diff
    values[0] = 0
    root = 0
    for i in range(n):
        if ppos[i] < 0:
            root = i
            values[order[i]] = 0
        elif up_p[i]:
            values[order[i]] = sub[i]
        else:
            values[order[i]] = sub[root] - sub[i]
    return values


@njit(cache=True)
def flow_degrees(order, parent, values):
    """Per-vertex count of incident tree edges with nonzero / positive flow."""
    n1 = parent.shape[0]
    nonzero = np.zeros(n1, IDX)
    positive = np.zeros(n1, IDX)
    for i in range(order.shape[0]):
        v = order[i]
        p = parent[v]
        if p and values[v]:
            nonzero[v] += 1
            nonzero[p] += 1
            if values[v] > 0:
                positive[v] += 1
                positive[p] += 1
    return nonzero, positive


@njit(cache=True)
def label_pieces(order, parent, removed):
    """Components of the forest minus the ``removed`` tree edges.

    Returns 0-based labels numbered by smallest member, and the count.
    """
    n1 = parent.shape[0]
    raw = np.zeros(n1, IDX)
    count = 0
    for i in range(order.shape[0]):
        v = order[i]
        if parent[v] and not removed[v]:
            raw[v] = raw[parent[v]]
        else:
            raw[v] = count
            count += 1
    rename = np.full(count, -1, IDX)
    label = np.full(n1, -1, IDX)
    nxt = 0
    for v in range(1, n1):
        r = raw[v]
        if rename[r] < 0:
            rename[r] = nxt
            nxt += 1
        label[v] = rename[r]
    return label, count


@njit(cache=True)
def greedy_assign(out_ptr, out_idx, in_ptr, in_idx, parent, comp_of, depth, residual, order):
    """Deepest-first choice of first and last steps in the active pieces.

    ``order`` lists the token roles to process as ``2 * v + role`` (role 0
    assigns ``f[v]`` from out-neighbours, role 1 assigns ``g[v]`` from
    in-neighbours), sorted deepest first; ``depth`` comes from
    :func:`forest_depths`.  Returns ``(failed_label, f, g)`` with
    ``failed_label == -1`` on success; ``residual`` is decremented in place.
    """
    n1 = parent.shape[0]
    f = np.zeros(n1, IDX)
    g = np.zeros(n1, IDX)
    f_claimed = np.zeros(n1, np.bool_)
    g_claimed = np.zeros(n1, np.bool_)
    for j in range(order.shape[0]):
        v = order[j] // 2
        role = order[j] % 2
        c = comp_of[v]
        best = 0
        best_depth = -1
        if role == 0:
            for i in range(out_ptr[v], out_ptr[v + 1]):
                u = out_idx[i]
                if comp_of[u] != c or f_claimed[u]:
                    continue
                key = u if parent[u] == v else v
                if residual[key] >= 1 and (depth[u] > best_depth or (depth[u] == best_depth and u < best)):
                    best = u
                    best_depth = depth[u]
            if best == 0:
                return c, f, g
            f[v] = best
            f_claimed[best] = True
        else:
            for i in range(in_ptr[v], in_ptr[v + 1]):
                u = in_idx[i]
                if comp_of[u] != c or g_claimed[u]:
                    continue
                key = u if parent[u] == v else v
                if residual[key] >= 1 and (depth[u] > best_depth or (depth[u] == best_depth and u < best)):
                    best = u
                    best_depth = depth[u]
            if best == 0:
                return c, f, g
            g[v] = best
            g_claimed[best] = True
        key = best if parent[best] == v else v
        residual[key] -= 1
    return -1, f, g


@njit(cache=True)
def forest_potential(order, ppos, up_p):
    """Forward-minus-reverse arc count from each component root."""
    n = order.shape[0]
    dp = np.zeros(n, IDX)
    d = np.zeros(n + 1, IDX)
    for i in range(n):
        p = ppos[i]
        if p >= 0:
            dp[i] = dp[p] - 1 if up_p[i] else dp[p] + 1
        d[order[i]] = dp[i]
    return d


@njit(cache=True)
def match_paths(out_ptr, out_idx, comp_of, label, parent, residual, d, xs, sinks):
    """Grow one directed path per source over arcs with positive residual.

    Each round starts at the unmatched source of least ``(d, id)``, finds
    every vertex reachable over positive-residual arcs inside piece
    ``label`` (``label < 0`` disables the piece filter), ends at the
    reachable sink of least ``(d, id)`` and consumes one unit of residual
    along the path.  Returns ``(status, flat, offsets)``: status 0 on
    success, ``-v`` when no sink is reachable from ``v``, and 1 when some
    used arc keeps residual flow afterwards.
    """
    n1 = parent.shape[0]
    k = xs.shape[0]
    used = np.zeros(k, np.bool_)
    stamp = np.zeros(n1, IDX)
    pred = np.zeros(n1, IDX)
    queue = np.empty(n1, IDX)
    touched = np.zeros(n1, np.bool_)
    flat = np.empty(max(16, 2 * k), IDX)
    offsets = np.zeros(k + 1, np.int64)
    for rnd in range(1, k + 1):
        start = -1
        for j in range(k):
            if not used[j]:
                x = xs[j]
                if start < 0 or d[x] < d[xs[start]] or (d[x] == d[xs[start]] and x < xs[start]):
                    start = j
        used[start] = True
        s = xs[start]
        stamp[s] = rnd
        queue[0] = s
        head = 0
        tail = 1
        end = 0
        while head < tail:
            v = queue[head]
            head += 1
            if sinks[v] and (end == 0 or d[v] < d[end] or (d[v] == d[end] and v < end)):
                end = v
            for i in range(out_ptr[v], out_ptr[v + 1]):
                u = out_idx[i]
                if label >= 0 and comp_of[u] != label:
                    continue
                slot = u if parent[u] == v else v
                if stamp[u] != rnd and residual[slot] > 0:
                    stamp[u] = rnd
                    pred[u] = v
                    queue[tail] = u
                    tail += 1
        if end == 0:
            return -s, np.empty(0, IDX), offsets
        length = 1
        v = end
        while v != s:
            v = pred[v]
            length += 1
        base = offsets[rnd - 1]
        if base + length > flat.shape[0]:
            grown = np.empty(max(2 * flat.shape[0], base + length), IDX)
            grown[:base] = flat[:base]
            flat = grown
        v = end
        for i in range(length - 1, -1, -1):
            flat[base + i] = v
            if i:
                a = pred[v]
                slot = v if parent[v] == a else a
                residual[slot] -= 1
                touched[slot] = True
                v = a
        sinks[end] = False
        offsets[rnd] = base + length
    flat = flat[:offsets[k]]
    for v in range(n1):
        if touched[v] and residual[v] != 0:
            return 1, flat, offsets
    return 0, flat, offsets


@njit(cache=True)
def _touch_edges(flat, offsets, on_ptr, on_idx, out_ptr, out_idx, in_ptr, in_idx, comp_of, label, fill, tails, heads):
    """Count (``fill`` False) or record the touch-precedence edges."""
    k = offsets.shape[0] - 1
    stamp = np.zeros(k, IDX)
    count = 0
    for phase in range(2):
        stamp[:] = 0
        for p in range(k):
            # phase 0: the first vertex of path p touches path q, so p runs first
            # phase 1: the last vertex of path p touches path q, so q runs first
            v = flat[offsets[p]] if phase == 0 else flat[offsets[p + 1] - 1]
            for side in range(3):
                if side == 0:
                    lo, hi = 0, 1
                elif side == 1:
                    lo, hi = out_ptr[v], out_ptr[v + 1]
                else:
                    lo, hi = in_ptr[v], in_ptr[v + 1]
                for t in range(lo, hi):
                    if side == 0:
                        u = v
                    elif side == 1:
                        u = out_idx[t]
                    else:
                        u = in_idx[t]
                    if label >= 0 and comp_of[u] != label:
                        continue
                    for r in range(on_ptr[u], on_ptr[u + 1]):
                        q = on_idx[r]
                        if q == p or stamp[q] == p + 1:
                            continue
                        stamp[q] = p + 1
                        if fill:
                            if phase == 0:
                                tails[count] = p
                                heads[count] = q
                            else:
                                tails[count] = q
                                heads[count] = p
                        count += 1
    return count


@njit(cache=True)
def touch_schedule(flat, offsets, n1, out_ptr, out_idx, in_ptr, in_idx, comp_of, label):
    """Execution order of paths under the touch-precedence relation.

    Smallest available index first; returns an empty array on a cycle.
    """
    k = offsets.shape[0] - 1
    # only the closed neighbourhoods of path endpoints are ever queried
    mark = np.zeros(n1, np.bool_)
    for p in range(k):
        for end in range(2):
            v = flat[offsets[p]] if end == 0 else flat[offsets[p + 1] - 1]
            mark[v] = True
            for t in range(out_ptr[v], out_ptr[v + 1]):
                mark[out_idx[t]] = True
            for t in range(in_ptr[v], in_ptr[v + 1]):
                mark[in_idx[t]] = True
    on_ptr = np.zeros(n1 + 1, np.int64)
    for i in range(flat.shape[0]):
        if mark[flat[i]]:
            on_ptr[flat[i] + 1] += 1
    for v in range(1, n1 + 1):
        on_ptr[v] += on_ptr[v - 1]
    on_idx = np.empty(on_ptr[n1], IDX)
    fillp = on_ptr[:-1].copy()
    for p in range(k):
        for i in range(offsets[p], offsets[p + 1]):
            v = flat[i]
            if mark[v]:
                on_idx[fillp[v]] = p
                fillp[v] += 1
    dummy = np.empty(0, IDX)
    m = _touch_edges(flat, offsets, on_ptr, on_idx, out_ptr, out_idx, in_ptr, in_idx, comp_of, label, False, dummy, dummy)
    tails = np.empty(m, IDX)
    heads = np.empty(m, IDX)
    _touch_edges(flat, offsets, on_ptr, on_idx, out_ptr, out_idx, in_ptr, in_idx, comp_of, label, True, tails, heads)
    return kahn(k, tails, heads)


@njit(cache=True)
def gather_moves(flat, offsets, order):
    """Consecutive vertex pairs of the paths taken in ``order``, as an ``L x 2`` array."""
    total = 0
    for j in range(order.shape[0]):
        p = order[j]
        total += offsets[p + 1] - offsets[p] - 1
    out = np.empty((total, 2), IDX)
    r = 0
    for j in range(order.shape[0]):
        p = order[j]
        for i in range(offsets[p], offsets[p + 1] - 1):
            out[r, 0] = flat[i]
            out[r, 1] = flat[i + 1]
            r += 1
    return out


@njit(cache=True)
def kahn(count, tails, heads):
    """Topological order, smallest available index first; empty on a cycle."""
    succ_ptr = np.zeros(count + 1, IDX)
    indeg = np.zeros(count, IDX)
    for i in range(tails.shape[0]):
        succ_ptr[tails[i] + 1] += 1
        indeg[heads[i]] += 1
    for v in range(1, count + 1):
        succ_ptr[v] += succ_ptr[v - 1]
    succ = np.empty(tails.shape[0], IDX)
    fill = succ_ptr[:-1].copy()
    for i in range(tails.shape[0]):
        succ[fill[tails[i]]] = heads[i]
        fill[tails[i]] += 1
    heap = [IDX(0)]
    heap.pop()
    for v in range(count):
        if indeg[v] == 0:
            heapq.heappush(heap, IDX(v))
    order = np.empty(count, IDX)
    done = 0
    while heap:
        v = heapq.heappop(heap)
        order[done] = v
        done += 1
        for i in range(succ_ptr[v], succ_ptr[v + 1]):
            u = succ[i]
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(heap, u)
    if done != count:
        return np.empty(0, IDX)
    return order
