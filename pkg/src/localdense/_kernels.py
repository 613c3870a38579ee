"""Compiled inner loops: Frank-Wolfe steps, bucket peeling, push-relabel max-flow."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def fw_steps(members, n, alpha, r, first, iters):
    """Frank-Wolfe steps ``first .. first+iters-1`` in place.

    Each pattern's unit goes to its least-loaded member; rows are sorted by
    id with padding ``n`` at the end, so the first minimum is the smallest id.
    """
    p, w = members.shape
    hits = np.zeros(n, dtype=np.float64)
    for i in range(first, first + iters):
        gamma = 2.0 / (i + 2)
        keep = 1.0 - gamma
        for v in range(n):
            hits[v] = 0.0
        for q in range(p):
            best = 0
            best_r = r[members[q, 0]]
            for j in range(1, w):
                u = members[q, j]
                if u >= n:
                    break
                if r[u] < best_r:
                    best_r = r[u]
                    best = j
            for j in range(w):
                alpha[q, j] *= keep
            alpha[q, best] += gamma
            hits[members[q, best]] += 1.0
        for v in range(n):
            r[v] = keep * r[v] + gamma * hits[v]


@njit(cache=True)
def _bucket_peel(n, count, alive, inc_ptr, inc_idx, owners, owner_alive, arity):
    # Batagelj-Zaversnik bucket peeling generalised to hyperedges: removing v
    # kills every live hyperedge on v and decrements its other members.
    core = np.full(n, -1, dtype=np.int64)
    deg = count.copy()
    md = 0
    for v in range(n):
        if alive[v] and deg[v] > md:
            md = deg[v]
    bins = np.zeros(md + 2, dtype=np.int64)
    nv = 0
    for v in range(n):
        if alive[v]:
            bins[deg[v]] += 1
            nv += 1
    start = 0
    for d in range(md + 1):
        c = bins[d]
        bins[d] = start
        start += c
    pos = np.zeros(n, dtype=np.int64)
    vert = np.zeros(nv, dtype=np.int64)
    for v in range(n):
        if alive[v]:
            pos[v] = bins[deg[v]]
            vert[pos[v]] = v
            bins[deg[v]] += 1
    for d in range(md, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0
    for i in range(nv):
        v = vert[i]
        dv = deg[v]
        core[v] = dv
        for k in range(inc_ptr[v], inc_ptr[v + 1]):
            h = inc_idx[k]
            if not owner_alive[h]:
                continue
            owner_alive[h] = False
            for j in range(arity):
                u = owners[h, j]
                if u == v or not alive[u]:
                    continue
                du = deg[u]
                if du > dv:
                    pu = pos[u]
                    pw = bins[du]
                    w = vert[pw]
                    if u != w:
                        pos[u] = pw
                        pos[w] = pu
                        vert[pu] = w
                        vert[pw] = u
                    bins[du] += 1
                    deg[u] = du - 1
    return core


def peel_cores(n: int, hyperedges: np.ndarray, alive: np.ndarray) -> np.ndarray:
    """Core numbers of the hypergraph induced by ``alive`` (-1 for dead vertices).

    With 2-column ``hyperedges`` this is the ordinary k-core decomposition;
    with triangles it is the tr-core decomposition.
    """
    hyperedges = np.ascontiguousarray(hyperedges, dtype=np.int64)
    alive = np.ascontiguousarray(alive, dtype=np.bool_)
    arity = hyperedges.shape[1] if hyperedges.ndim == 2 else 2
    hyperedges = hyperedges.reshape(-1, arity)
    live = alive[hyperedges].all(axis=1) if len(hyperedges) else np.zeros(0, dtype=np.bool_)
    edges = hyperedges[live]
    flat = edges.ravel()
    owner = np.repeat(np.arange(len(edges), dtype=np.int64), arity)
    order = np.argsort(flat, kind="stable")
    inc_idx = owner[order]
    count = np.bincount(flat, minlength=n).astype(np.int64)
    inc_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(count, out=inc_ptr[1:])
    owner_alive = np.ones(len(edges), dtype=np.bool_)
    return _bucket_peel(n, count, alive, inc_ptr, inc_idx, edges, owner_alive, arity)


@njit(cache=True)
def _global_relabel(n, s, t, ptr, head, rev, cap, label, count):
    for v in range(n):
        label[v] = n
    for d in range(n + 1):
        count[d] = 0
    queue = np.empty(n, dtype=np.int64)
    label[t] = 0
    queue[0] = t
    qh = 0
    qt = 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        for a in range(ptr[v], ptr[v + 1]):
            w = head[a]
            # w -> v has residual capacity on the paired arc
            if label[w] == n and w != s and cap[rev[a]] > 0:
                label[w] = label[v] + 1
                queue[qt] = w
                qt += 1
    label[s] = n
    for v in range(n):
        count[label[v]] += 1


@njit(cache=True)
def _push_relabel(n, s, t, ptr, head, rev, cap):
    excess = np.zeros(n, dtype=np.int64)
    label = np.zeros(n, dtype=np.int64)
    count = np.zeros(n + 1, dtype=np.int64)
    cur = ptr[:-1].copy()
    bhead = np.full(n + 1, -1, dtype=np.int64)
    bnext = np.full(n, -1, dtype=np.int64)
    inb = np.zeros(n, dtype=np.bool_)

    for a in range(ptr[s], ptr[s + 1]):
        f = cap[a]
        if f > 0:
            cap[a] = 0
            cap[rev[a]] += f
            excess[head[a]] += f
            excess[s] -= f

    _global_relabel(n, s, t, ptr, head, rev, cap, label, count)
    highest = 0
    for v in range(n):
        if v != s and v != t and excess[v] > 0 and label[v] < n:
            bnext[v] = bhead[label[v]]
            bhead[label[v]] = v
            inb[v] = True
            if label[v] > highest:
                highest = label[v]

    work = 0
    relabel_every = 6 * n + ptr[n] // 2
    while highest >= 0:
        v = bhead[highest]
        if v < 0:
            highest -= 1
            continue
        bhead[highest] = bnext[v]
        inb[v] = False
        if label[v] != highest:
            continue  # lifted to n by a gap
        while excess[v] > 0 and label[v] < n:
            a = cur[v]
            if a == ptr[v + 1]:
                # relabel
                old = label[v]
                best = 2 * n
                for b in range(ptr[v], ptr[v + 1]):
                    if cap[b] > 0 and label[head[b]] + 1 < best:
                        best = label[head[b]] + 1
                work += 12 + ptr[v + 1] - ptr[v]
                if best > n:
                    best = n
                count[old] -= 1
                label[v] = best
                count[best] += 1
                cur[v] = ptr[v]
                if count[old] == 0 and old < n:
                    # gap: nothing left at old, everything above it is cut off
                    for u in range(n):
                        if old < label[u] < n:
                            count[label[u]] -= 1
                            label[u] = n
                            count[n] += 1
                continue
            w = head[a]
            if cap[a] > 0 and label[v] == label[w] + 1:
                delta = excess[v] if excess[v] < cap[a] else cap[a]
                cap[a] -= delta
                cap[rev[a]] += delta
                excess[v] -= delta
                if excess[w] == 0 and w != t and w != s and not inb[w]:
                    lw = label[w]
                    bnext[w] = bhead[lw]
                    bhead[lw] = w
                    inb[w] = True
                    if lw > highest:
                        highest = lw
                excess[w] += delta
            else:
                cur[v] = a + 1
        if excess[v] > 0 and label[v] < n:
            # still active: back into its bucket
            bnext[v] = bhead[label[v]]
            bhead[label[v]] = v
            inb[v] = True
            if label[v] > highest:
                highest = label[v]
        if work > relabel_every:
            work = 0
            _global_relabel(n, s, t, ptr, head, rev, cap, label, count)
            for d in range(n + 1):
                bhead[d] = -1
            highest = 0
            for u in range(n):
                inb[u] = False
                cur[u] = ptr[u]
                if u != s and u != t and excess[u] > 0 and label[u] < n:
                    bnext[u] = bhead[label[u]]
                    bhead[label[u]] = u
                    inb[u] = True
                    if label[u] > highest:
                        highest = label[u]
            continue
    return excess[t]


@njit(cache=True)
def _reaches_sink(n, t, ptr, head, rev, cap):
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    seen[t] = True
    queue[0] = t
    qh = 0
    qt = 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        for a in range(ptr[v], ptr[v + 1]):
            w = head[a]
            if not seen[w] and cap[rev[a]] > 0:
                seen[w] = True
                queue[qt] = w
                qt += 1
    return seen


def max_flow_arrays(n: int, s: int, t: int, tail: np.ndarray, head: np.ndarray,
                    cap: np.ndarray) -> tuple[int, np.ndarray]:
    """Max-flow value and the maximal min-cut source side as a bool mask."""
    m = len(tail)
    tails = np.concatenate([tail, head]).astype(np.int64)
    heads = np.concatenate([head, tail]).astype(np.int64)
    caps = np.concatenate([cap, np.zeros(m, dtype=np.int64)]).astype(np.int64)
    order = np.argsort(tails, kind="stable")
    where = np.empty(2 * m, dtype=np.int64)
    where[order] = np.arange(2 * m)
    partner = np.concatenate([np.arange(m, 2 * m), np.arange(m)])
    rev = where[partner[order]]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(tails, minlength=n), out=ptr[1:])
    head_s = heads[order]
    cap_s = caps[order]
    value = _push_relabel(n, s, t, ptr, head_s, rev, cap_s)
    source_side = ~_reaches_sink(n, t, ptr, head_s, rev, cap_s)
    return int(value), source_side
