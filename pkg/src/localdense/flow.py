"""Exact max-flow verification.

All densities enter networks as exact fractions ``a/b`` and are scaled to
integer capacities; floating-point bounds are only used, with a safety margin,
to decide which vertices a network has to contain.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import max_flow_arrays
from .graph import (Graph, TriangleIndex, as_vertex_set, enumerate_triangles,
                    induced_subgraph, is_connected)
from .stable_groups import BoundsTable

EPS = 1e-7
INT64_MAX = 2**63 - 1


class FlowOverflowError(OverflowError):
    """A scaled capacity or flow total does not fit in 64 bits."""


class ContractViolation(ValueError):
    """A verifier was called on a candidate that breaks its precondition."""


@dataclass(frozen=True)
class FlowNetwork:
    n_nodes: int
    tail: np.ndarray
    head: np.ndarray
    cap: np.ndarray
    source: int
    sink: int

    @property
    def n_arcs(self) -> int:
        return len(self.tail)

    @classmethod
    def build(cls, n_nodes: int, arcs: Iterable[tuple[int, int, int]], source: int,
              sink: int) -> "FlowNetwork":
        arcs = list(arcs)
        for u, v, c in arcs:
            if c < 0:
                raise ValueError("negative capacity")
            if c > INT64_MAX:
                raise FlowOverflowError(f"capacity {c} exceeds 64 bits")
            if v == source or u == sink:
                raise ValueError("source in-arc or sink out-arc")
        if sum(c for u, _, c in arcs if u == source) > INT64_MAX:
            raise FlowOverflowError("total source capacity exceeds 64 bits")
        arr = np.array(arcs, dtype=np.int64).reshape(-1, 3)
        return cls(n_nodes, arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(), source, sink)


def max_flow(net: FlowNetwork) -> tuple[int, np.ndarray]:
    """Max-flow value and the maximal min-cut source side (sorted node ids).

    The source side is every node that cannot reach the sink in the residual
    network, which is the largest of all minimum cuts.
    """
    value, side = max_flow_arrays(net.n_nodes, net.source, net.sink, net.tail, net.head, net.cap)
    return value, np.flatnonzero(side)


@dataclass(frozen=True)
class Pattern:
    members: tuple[int, ...]
    full_size: int

    def __post_init__(self):
        if not self.members or len(set(self.members)) != len(self.members):
            raise ValueError("pattern members must be non-empty and distinct")
        if tuple(sorted(self.members)) != self.members:
            object.__setattr__(self, "members", tuple(sorted(self.members)))


@dataclass(frozen=True)
class PatternCut:
    """Outcome of one pattern-network flow.

    ``inside`` marks local vertices on the maximal source side; ``value`` is
    the max-flow value, equal to ``b*|P| - b*t0(A) + a*|A|`` for that side.
    """

    inside: np.ndarray
    value: int
    nodes: int
    arcs: int


def _check_capacity(*values: int) -> None:
    for v in values:
        if v > INT64_MAX:
            raise FlowOverflowError(f"capacity {v} exceeds 64 bits")


def pattern_cut(n: int, members: np.ndarray, a: int, b: int,
                inner: Optional[int] = None) -> PatternCut:
    """Min cut of the pattern network on ``n`` local vertices.

    ``members`` is a padded ``(P, w)`` array (padding value ``n``).  Arcs are
    source->pattern ``b``, pattern->member ``inner`` (default ``b``) and
    vertex->sink ``a``.
    """
    if b <= 0:
        raise ValueError("density denominator must be positive")
    inner = b if inner is None else inner
    members = np.asarray(members, dtype=np.int64)
    if members.ndim != 2:
        members = members.reshape(len(members), -1) if len(members) else members.reshape(0, 1)
    p = len(members)
    _check_capacity(a, b, inner, p * b, n * a)
    s, t = 0, 1
    pat0 = 2
    ver0 = 2 + p
    real = members < n
    rows, cols = np.nonzero(real)
    tail = np.concatenate([np.full(p, s), pat0 + rows, ver0 + np.arange(n)])
    head = np.concatenate([pat0 + np.arange(p), ver0 + members[rows, cols], np.full(n, t)])
    cap = np.concatenate([np.full(p, b), np.full(len(rows), inner), np.full(n, a)])
    n_nodes = ver0 + n
    value, side = max_flow_arrays(n_nodes, s, t, tail.astype(np.int64), head.astype(np.int64),
                                  cap.astype(np.int64))
    return PatternCut(side[ver0:], value, n_nodes, len(tail))


def _padded(patterns: Sequence[Sequence[int]], index: dict[int, int], pad: int) -> np.ndarray:
    width = max((len(p) for p in patterns), default=1)
    out = np.full((len(patterns), width), pad, dtype=np.int64)
    for i, p in enumerate(patterns):
        local = sorted(index[x] for x in p)
        out[i, :len(local)] = local
    return out


def ext_maximal_cut(u_set: Iterable[int], patterns: Sequence, rho: Fraction) -> tuple[np.ndarray, PatternCut]:
    rho = Fraction(rho)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    verts = sorted(set(int(u) for u in u_set))
    index = {u: i for i, u in enumerate(verts)}
    mems = []
    for p in patterns:
        m = p.members if isinstance(p, Pattern) else tuple(p)
        if any(x not in index for x in m):
            raise ValueError("pattern member outside u_set")
        mems.append(m)
    cut = pattern_cut(len(verts), _padded(mems, index, len(verts)), rho.numerator, rho.denominator)
    return np.array(verts, dtype=np.int64)[cut.inside], cut


def ext_maximal(u_set: Iterable[int], patterns: Sequence, rho: Fraction) -> np.ndarray:
    """Vertices of ``u_set`` whose local compactness in the pattern system is >= rho.

    This is the largest maximiser of ``t0(A) - rho*|A|``, where ``t0(A)``
    counts the patterns lying entirely inside ``A``.
    """
    return ext_maximal_cut(u_set, patterns, rho)[0]


def _self_densest(n: int, members: np.ndarray, width: int) -> bool:
    # unit n per pattern, effectively unbounded inner arcs, sink arcs |P|
    p = len(members)
    if p == 0:
        return True
    cut = pattern_cut(n, members, p, n, inner=width * p * n)
    return cut.value == p * n


def is_densest_edge(g: Graph) -> bool:
    """True iff no induced subgraph of ``g`` is strictly denser than ``g``."""
    if g.n == 0:
        raise ValueError("empty graph")
    return _self_densest(g.n, g.edges, 2)


def is_densest_tr(g: Graph, t: Optional[TriangleIndex] = None) -> bool:
    if g.n == 0:
        raise ValueError("empty graph")
    t = t if t is not None else enumerate_triangles(g)
    return _self_densest(g.n, t.triangles, 3)


def peel_denser(adj: list[list[int]], members: Sequence[int]) -> bool:
    """Greedy min-degree peeling of ``G[members]``; True if it meets a strictly
    denser proper subset (so the set is not self-densest)."""
    inside = set(members)
    deg = {u: sum(1 for w in adj[u] if w in inside) for u in inside}
    m = sum(deg.values()) // 2
    n = len(inside)
    heap = [(d, u) for u, d in deg.items()]
    heapq.heapify(heap)
    cur_m, cur_n = m, n
    while cur_n > 1:
        d, u = heapq.heappop(heap)
        if u not in inside or d != deg[u]:
            continue
        inside.discard(u)
        cur_m -= d
        cur_n -= 1
        for w in adj[u]:
            if w in inside:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
        if cur_m * n > m * cur_n:
            return True
    return False


@dataclass(frozen=True)
class VerifyOutcome:
    ok: bool
    used_flow: bool
    nodes: int
    arcs: int
    visited: int


def _is_component(g: Graph, s: set[int], inside: set[int]) -> bool:
    if not s <= inside:
        return False
    adj = g.adj
    return all(w in s for u in s for w in adj[u] if w in inside)


def _members_fit(s: Sequence[int], bounds: BoundsTable, lo: float, hi: float) -> bool:
    idx = np.asarray(s, dtype=np.int64)
    return bool((bounds.phi_upper[idx] >= lo).all() and (bounds.phi_lower[idx] <= hi).all())


def _outside_high(g: Graph, s: set[int], bounds: BoundsTable, hi: float) -> bool:
    lower = bounds.phi_lower
    adj = g.adj
    return any(lower[w] > hi for u in s for w in adj[u] if w not in s)


def verify_lds(g: Graph, s: Sequence[int], bounds: BoundsTable, variant: str = "bounded",
               rho: Optional[Fraction] = None) -> VerifyOutcome:
    """Maximality test for a connected self-densest candidate ``G[s]``.

    ``variant="bounded"`` uses both bounds to keep the network small;
    ``variant="core"`` ignores lower bounds and traverses every vertex whose
    upper bound reaches the density.
    """
    members = sorted(int(u) for u in s)
    sset = set(members)
    if rho is None:
        m_s = sum(1 for u in members for w in g.adj[u] if w in sset) // 2
        rho = Fraction(m_s, len(members))
    lo, hi = float(rho) - EPS, float(rho) + EPS
    if not _members_fit(members, bounds, lo, hi):
        return VerifyOutcome(False, False, 0, 0, len(members))
    upper, lower = bounds.phi_upper, bounds.phi_lower
    adj = g.adj
    bounded = variant == "bounded"
    if bounded and _outside_high(g, sset, bounds, hi):
        return VerifyOutcome(False, False, 0, 0, len(members))

    in_u = set(members)
    order = list(members)
    loops: list[int] = []
    flag = False
    queue = deque(members)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w in in_u:
                continue
            if upper[w] < lo:
                continue
            if bounded:
                if bounds.below(w, rho):
                    continue
                if lower[w] > hi:
                    loops.append(u)
                    flag = True
                    continue
            in_u.add(w)
            order.append(w)
            queue.append(w)
    if not flag and len(in_u) == len(sset):
        return VerifyOutcome(True, False, 0, 0, len(in_u))

    verts = np.array(sorted(in_u), dtype=np.int64)
    local = {u: i for i, u in enumerate(verts.tolist())}
    pairs = [(local[u], local[w]) for u in verts.tolist() for w in adj[u] if w > u and w in in_u]
    nu = len(verts)
    members_arr = np.full((len(pairs) + len(loops), 2), nu, dtype=np.int64)
    if pairs:
        members_arr[:len(pairs)] = np.array(pairs, dtype=np.int64)
    for i, u in enumerate(loops):
        members_arr[len(pairs) + i, 0] = local[u]
    cut = pattern_cut(nu, members_arr, rho.numerator, rho.denominator)
    inside = set(verts[cut.inside].tolist())
    return VerifyOutcome(_is_component(g, sset, inside), True, cut.nodes, cut.arcs, nu)


def verify_ltds(g: Graph, t: TriangleIndex, s: Sequence[int], bounds: BoundsTable,
                variant: str = "bounded", rho: Optional[Fraction] = None) -> VerifyOutcome:
    """Triangle analogue of :func:`verify_lds`."""
    members = sorted(int(u) for u in s)
    sset = set(members)
    if rho is None:
        count = 0
        for u in members:
            for ti in t.incidence(u).tolist():
                a, b, c = t.triangles[ti].tolist()
                count += a == u and b in sset and c in sset
        rho = Fraction(count, len(members))
    lo, hi = float(rho) - EPS, float(rho) + EPS
    if not _members_fit(members, bounds, lo, hi):
        return VerifyOutcome(False, False, 0, 0, len(members))
    upper, lower = bounds.phi_upper, bounds.phi_lower
    adj = g.adj
    tri = t.triangles
    bounded = variant == "bounded"
    if bounded and _outside_high(g, sset, bounds, hi):
        return VerifyOutcome(False, False, 0, 0, len(members))

    in_u = set(members)
    queue = deque(members)
    flag = False
    patterns: list[tuple[int, ...]] = []
    if bounded:
        seen_tri: set[int] = set()
        while queue:
            u = queue.popleft()
            for ti in t.incidence(u).tolist():
                if ti in seen_tri:
                    continue
                seen_tri.add(ti)
                trio = tri[ti].tolist()
                if any(upper[x] < lo or bounds.below(x, rho) for x in trio):
                    continue
                kept = []
                for x in trio:
                    if lower[x] > hi:
                        flag = True
                        continue
                    kept.append(x)
                    if x not in in_u:
                        in_u.add(x)
                        queue.append(x)
                patterns.append(tuple(kept))
            for w in adj[u]:
                if w in in_u or upper[w] < lo or bounds.below(w, rho):
                    continue
                if lower[w] > hi:
                    flag = True
                    continue
                in_u.add(w)
                queue.append(w)
    else:
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in in_u and upper[w] >= lo:
                    in_u.add(w)
                    queue.append(w)
        for u in in_u:
            for ti in t.incidence(u).tolist():
                trio = tri[ti].tolist()
                if trio[0] == u and trio[1] in in_u and trio[2] in in_u:
                    patterns.append(tuple(trio))
    if not flag and len(in_u) == len(sset):
        return VerifyOutcome(True, False, 0, 0, len(in_u))

    verts = sorted(in_u)
    index = {u: i for i, u in enumerate(verts)}
    cut = pattern_cut(len(verts), _padded(patterns, index, len(verts)), rho.numerator, rho.denominator)
    inside = {verts[i] for i in np.flatnonzero(cut.inside).tolist()}
    return VerifyOutcome(_is_component(g, sset, inside), True, cut.nodes, cut.arcs, len(verts))


def _require_candidate(g: Graph, s: Iterable[int], densest) -> np.ndarray:
    members = as_vertex_set(s, g.n)
    if len(members) == 0:
        raise ContractViolation("empty candidate")
    sub = induced_subgraph(g, members)
    if not is_connected(sub):
        raise ContractViolation("candidate is not connected")
    if not densest(sub):
        raise ContractViolation("candidate is not self-densest")
    return members


def is_lds(s: Iterable[int], bounds: BoundsTable, g: Graph) -> bool:
    members = _require_candidate(g, s, is_densest_edge)
    return verify_lds(g, members.tolist(), bounds, "bounded").ok


def is_lds_core_variant(s: Iterable[int], bounds: BoundsTable, g: Graph) -> bool:
    members = _require_candidate(g, s, is_densest_edge)
    return verify_lds(g, members.tolist(), bounds, "core").ok


def is_ltds(s: Iterable[int], bounds: BoundsTable, g: Graph, t: Optional[TriangleIndex] = None) -> bool:
    t = t if t is not None else enumerate_triangles(g)
    members = _require_candidate(g, s, is_densest_tr)
    return verify_ltds(g, t, members.tolist(), bounds, "bounded").ok


def is_ltds_core_variant(s: Iterable[int], bounds: BoundsTable, g: Graph,
                         t: Optional[TriangleIndex] = None) -> bool:
    t = t if t is not None else enumerate_triangles(g)
    members = _require_candidate(g, s, is_densest_tr)
    return verify_ltds(g, t, members.tolist(), bounds, "core").ok
