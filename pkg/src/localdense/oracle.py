"""Exhaustive reference answers for small graphs.

Everything here enumerates vertex subsets as bitmasks and uses exact integer
or ``Fraction`` arithmetic.  It shares nothing with the fast pipeline except
the adjacency lists of :class:`~localdense.graph.Graph`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Literal

from .graph import Graph

Mode = Literal["edge", "triangle"]


class OracleTooLarge(RuntimeError):
    """The graph exceeds what exhaustive enumeration is allowed to handle."""


def _require(g: Graph, limit: int) -> None:
    if g.n > limit:
        raise OracleTooLarge(f"n={g.n} exceeds the oracle limit of {limit}")


def _adj_masks(g: Graph) -> list[int]:
    out = []
    for u in range(g.n):
        mask = 0
        for w in g.adj[u]:
            mask |= 1 << w
        out.append(mask)
    return out


def pattern_counts(g: Graph, mode: Mode) -> list[int]:
    """Number of edges (or triangles) inside every vertex mask."""
    adj = _adj_masks(g)
    size = 1 << g.n
    e = [0] * size
    for mask in range(1, size):
        v = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        e[mask] = e[rest] + (adj[v] & rest).bit_count()
    if mode == "edge":
        return e
    t = [0] * size
    for mask in range(1, size):
        v = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        t[mask] = t[rest] + e[adj[v] & rest]
    return t


def connected_masks(g: Graph) -> list[bool]:
    adj = _adj_masks(g)
    size = 1 << g.n
    ok = [False] * size
    for mask in range(1, size):
        start = mask & -mask
        reach = start
        frontier = start
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = adj[v] & mask & ~reach
            reach |= new
            frontier |= new
        ok[mask] = reach == mask
    return ok


def _compactness(mask: int, counts: list[int]) -> tuple[int, int]:
    # min over non-empty Q within mask of (c(S) - c(S\Q)) / |Q|, as (num, den)
    total = counts[mask]
    best_n, best_d = None, 1
    q = mask
    while q:
        lost = total - counts[mask & ~q]
        k = q.bit_count()
        if best_n is None or lost * best_d < best_n * k:
            best_n, best_d = lost, k
        q = (q - 1) & mask
    return best_n, best_d


def compactness_table(g: Graph, mode: Mode) -> tuple[list[int], list[Fraction]]:
    counts = pattern_counts(g, mode)
    conn = connected_masks(g)
    comp = [Fraction(0)] * (1 << g.n)
    for mask in range(1, 1 << g.n):
        if conn[mask]:
            num, den = _compactness(mask, counts)
            comp[mask] = Fraction(num, den)
    return counts, comp


def _whole_compactness(g: Graph, mode: Mode, limit: int) -> Fraction:
    _require(g, limit)
    if g.n == 0:
        return Fraction(0)
    full = (1 << g.n) - 1
    if not connected_masks(g)[full]:
        return Fraction(0)
    num, den = _compactness(full, pattern_counts(g, mode))
    return Fraction(num, den)


def compactness_bf(g: Graph) -> Fraction:
    """Largest rho such that ``g`` is rho-compact (0 if disconnected)."""
    return _whole_compactness(g, "edge", 20)


def tr_compactness_bf(g: Graph, t=None) -> Fraction:
    return _whole_compactness(g, "triangle", 20)


def compact_numbers_bf(g: Graph, mode: Mode = "edge") -> list[Fraction]:
    """(tr-)compact number of every vertex."""
    _require(g, 12)
    _, comp = compactness_table(g, mode)
    phi = [Fraction(0)] * g.n
    for mask in range(1, 1 << g.n):
        c = comp[mask]
        if c == 0:
            continue
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if c > phi[v]:
                phi[v] = c
    return phi


def enumerate_lds_bf(g: Graph, mode: Mode = "edge") -> list[tuple[list[int], Fraction]]:
    """Every LDS (or LTDS) as ``(sorted members, density)``, densest first.

    A connected ``G[S]`` qualifies when its compactness equals its positive
    density and no strict superset is compact at that density.
    """
    _require(g, 10)
    counts, comp = compactness_table(g, mode)
    full = (1 << g.n) - 1
    found = []
    for mask in range(1, full + 1):
        c = counts[mask]
        if c == 0:
            continue
        rho = Fraction(c, mask.bit_count())
        if comp[mask] != rho:
            continue
        free = full & ~mask
        extra = free
        maximal = True
        while extra:
            if comp[mask | extra] >= rho:
                maximal = False
                break
            extra = (extra - 1) & free
        if maximal:
            members = [v for v in range(g.n) if mask >> v & 1]
            found.append((members, rho))
    found.sort(key=lambda item: (-item[1], item[0][0]))
    return found


def densest_bf(g: Graph, mode: Mode = "edge") -> Fraction:
    """Largest (tr-)density over non-empty induced subgraphs; 0 for no patterns."""
    _require(g, 15)
    counts = pattern_counts(g, mode)
    best = Fraction(0)
    for mask in range(1, 1 << g.n):
        if counts[mask] and Fraction(counts[mask], mask.bit_count()) > best:
            best = Fraction(counts[mask], mask.bit_count())
    return best


def is_self_densest_bf(g: Graph, mode: Mode = "edge") -> bool:
    _require(g, 15)
    counts = pattern_counts(g, mode)
    full = (1 << g.n) - 1
    total, n = counts[full], g.n
    return all(counts[m] * n <= total * m.bit_count() for m in range(1, full + 1))
