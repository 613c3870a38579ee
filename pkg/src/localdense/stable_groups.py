"""Stable groups of an approximate CP state and the bounds they certify."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .frank_wolfe import CPState, Mode, PatternSystem
from .graph import Graph, TriangleIndex, core_decomposition, enumerate_triangles, tr_core_decomposition


@dataclass
class BoundsTable:
    """Per-vertex bounds on (tr-)compact numbers.

    ``strict_upper`` holds exact facts ``phi(u) < value`` learned from exact
    splits; it is sparse and only ever used to rule vertices out.
    """

    phi_upper: np.ndarray
    phi_lower: np.ndarray
    strict_upper: dict[int, Fraction] = field(default_factory=dict)

    def copy(self) -> "BoundsTable":
        return BoundsTable(self.phi_upper.copy(), self.phi_lower.copy(), dict(self.strict_upper))

    def below(self, u: int, rho: Fraction) -> bool:
        """True if phi(u) < rho is known exactly."""
        cap = self.strict_upper.get(u)
        return cap is not None and cap <= rho


def initial_bounds(g: Graph, mode: Mode = "edge", t: TriangleIndex | None = None) -> BoundsTable:
    """Upper bounds from (tr-)core numbers, lower bounds zero."""
    if mode == "edge":
        upper = core_decomposition(g).astype(float)
    else:
        upper = tr_core_decomposition(g, t if t is not None else enumerate_triangles(g)).astype(float)
    return BoundsTable(upper, np.zeros(g.n))


@dataclass(frozen=True)
class StableGroup:
    members: np.ndarray
    r_min: float
    r_max: float


def sort_by_load(r: np.ndarray) -> np.ndarray:
    """Vertex order by load descending, ties to the smaller id."""
    return np.lexsort((np.arange(len(r)), -r))


def _prefix_counts(system: PatternSystem, pos: np.ndarray) -> np.ndarray:
    # a pattern lies inside the first j sorted vertices iff its deepest member does
    n = system.n
    if system.size == 0:
        return np.zeros(n + 1, dtype=np.int64)
    ext = np.append(pos, -1)
    deepest = ext[system.members].max(axis=1)
    counts = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(deepest, minlength=n), out=counts[1:])
    return counts


def _boundaries(counts: np.ndarray) -> list[int]:
    """Prefix lengths j whose density beats every longer prefix strictly."""
    n = len(counts) - 1
    cs = counts.tolist()
    best_c, best_j = cs[n], n
    out = [n]
    for j in range(n - 1, 0, -1):
        c = cs[j]
        if c * best_j > best_c * j:
            best_c, best_j = c, j
            out.append(j)
    out.reverse()
    return out


def system_boundaries(system: PatternSystem, r: np.ndarray) -> tuple[np.ndarray, list[int]]:
    order = sort_by_load(r)
    pos = np.empty(system.n, dtype=np.int64)
    pos[order] = np.arange(system.n)
    return order, _boundaries(_prefix_counts(system, pos))


def candidate_boundaries(g: Graph, r: np.ndarray, mode: Mode = "edge",
                         t: TriangleIndex | None = None) -> list[int]:
    """End positions (1-based prefix lengths) of the candidate groups."""
    if g.n == 0:
        return []
    if mode == "triangle" and t is None:
        t = enumerate_triangles(g)
    _, bounds = system_boundaries(PatternSystem.from_graph(g, mode, t), np.asarray(r, dtype=float))
    return bounds


@dataclass(frozen=True)
class Grouping:
    """Result of stable-group extraction on a pattern system.

    ``block`` gives each local vertex its group index (0 = highest loads) and
    ``r`` the loads in the modified state that certifies the groups.
    """

    block: np.ndarray
    count: int
    r: np.ndarray
    r_min: np.ndarray
    r_max: np.ndarray
    rounds: int


def _modified_loads(system: PatternSystem, alpha: np.ndarray, vblock: np.ndarray,
                    pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # every pattern's unit moves into its lowest block; shares of members in
    # that block are kept and the rest goes to its least-loaded member there
    n = system.n
    members = system.members
    real = members < n
    blk = np.where(real, np.append(vblock, -1)[members], -1)
    low = blk.max(axis=1)
    keep = blk == low[:, None]
    kept = np.where(keep, alpha, 0.0)
    moved = alpha.sum(axis=1) - kept.sum(axis=1)
    ppos = np.where(real, np.append(pos, -1)[members], -1)
    sink = members[np.arange(len(members)), ppos.argmax(axis=1)]
    r = np.bincount(members[real], weights=kept[real], minlength=n)
    r += np.bincount(sink, weights=moved, minlength=n)
    return r[:n], low


def extract_system_groups(system: PatternSystem, state: CPState) -> Grouping:
    n = system.n
    order, ends = system_boundaries(system, state.r)
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    alpha = state.alpha
    rounds = 0
    while True:
        rounds += 1
        starts = np.array([0] + ends[:-1], dtype=np.int64)
        sorted_block = np.repeat(np.arange(len(ends)), np.diff(np.append(starts, n)))
        vblock = sorted_block[pos]
        if system.size:
            r_mod, _ = _modified_loads(system, alpha, vblock, pos)
        else:
            r_mod = np.zeros(n)
        nb = len(ends)
        mins = np.full(nb, np.inf)
        maxs = np.full(nb, -np.inf)
        np.minimum.at(mins, vblock, r_mod)
        np.maximum.at(maxs, vblock, r_mod)
        above = np.minimum.accumulate(np.concatenate([[np.inf], mins[:-1]]))
        below = np.maximum.accumulate(np.concatenate([[-np.inf], maxs[::-1][:-1]]))[::-1]
        ok = (mins > below) & (maxs < above)
        if ok.all():
            return Grouping(vblock, nb, r_mod, mins, maxs, rounds)
        # a failing group absorbs the next one; the last absorbs the previous
        drop = set()
        for b in np.flatnonzero(~ok).tolist():
            drop.add(b if b < nb - 1 else b - 1)
        ends = [e for i, e in enumerate(ends) if i not in drop]


def tighten_bounds(bounds: BoundsTable, system: PatternSystem, grouping: Grouping) -> None:
    """Apply the group bounds in place (global ids via ``system.vertices``)."""
    gids = system.vertices
    hi = grouping.r_max[grouping.block]
    lo = grouping.r_min[grouping.block]
    bounds.phi_upper[gids] = np.minimum(bounds.phi_upper[gids], hi)
    bounds.phi_lower[gids] = np.maximum(bounds.phi_lower[gids], lo)
    # float noise must not invert a table entry
    bounds.phi_lower[gids] = np.minimum(bounds.phi_lower[gids], bounds.phi_upper[gids])


def split_system(system: PatternSystem, block: np.ndarray, count: int) -> list[PatternSystem]:
    """Sub-systems of each block.

    A pattern belongs to the lowest block it touches and keeps only its
    members there; members in higher blocks are dropped, so an edge to a
    higher block becomes a one-member loop.
    """
    n = system.n
    members = system.members
    real = members < n
    blk = np.where(real, np.append(block, -1)[members], -1)
    low = blk.max(axis=1) if len(members) else np.zeros(0, dtype=np.int64)
    keep = blk == low[:, None]
    local = np.empty(n, dtype=np.int64)
    out = []
    by_block = np.argsort(low, kind="stable")
    cut = np.searchsorted(low[by_block], np.arange(count + 1))
    for b in range(count):
        verts = np.flatnonzero(block == b)
        local[verts] = np.arange(len(verts))
        rows = by_block[cut[b]:cut[b + 1]]
        sub = members[rows]
        mask = keep[rows]
        mapped = np.where(mask, local[np.minimum(sub, n - 1)], len(verts))
        mapped.sort(axis=1)
        width = int(mask.sum(axis=1).max()) if len(rows) else 1
        out.append(PatternSystem(system.vertices[verts], np.ascontiguousarray(mapped[:, :width])))
    return out


def extract_stable_groups(g: Graph, state: CPState, bounds: BoundsTable,
                          t: TriangleIndex | None = None) -> tuple[list[StableGroup], BoundsTable]:
    """Stable groups of ``state`` on ``g`` plus tightened bounds.

    Groups come back in descending load order and partition the vertices.
    """
    mode = state.mode
    if mode == "triangle" and t is None:
        t = enumerate_triangles(g)
    system = PatternSystem.from_graph(g, mode, t)
    grouping = extract_system_groups(system, state)
    new = bounds.copy()
    tighten_bounds(new, system, grouping)
    groups = [StableGroup(np.flatnonzero(grouping.block == b), float(grouping.r_min[b]),
                          float(grouping.r_max[b])) for b in range(grouping.count)]
    return groups, new
