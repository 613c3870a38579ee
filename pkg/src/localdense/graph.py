"""Compact undirected simple graphs, triangles and core decompositions.

Vertices carry contiguous internal ids ``0..n-1``; the external label of each
vertex is kept in ``Graph.labels``.  Adjacency is stored in CSR form
(``indptr``/``indices``) with strictly increasing neighbour lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Optional, Sequence, TextIO

import numpy as np

from ._kernels import peel_cores

_INT_LABEL = re.compile(r"(0|[1-9][0-9]*)\Z")


class EdgeListParseError(ValueError):
    """Raised for a malformed edge-list line."""

    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected two tokens, got {line.strip()!r}")
        self.lineno = lineno


@dataclass(frozen=True)
class LoadStats:
    lines: int = 0
    edges_read: int = 0
    duplicates: int = 0
    self_loops: int = 0


class Graph:
    """Immutable undirected simple graph.

    ``edges`` is an ``(m, 2)`` int64 array of canonical pairs ``u < v`` in
    lexicographic order.  ``parent_ids`` is set on induced subgraphs and maps
    each internal id back to the id in the graph it was taken from.
    """

    def __init__(
        self,
        n: int,
        edges: np.ndarray,
        labels: Optional[Sequence[Hashable]] = None,
        parent_ids: Optional[np.ndarray] = None,
        load_stats: Optional[LoadStats] = None,
    ):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.n = int(n)
        self.edges = edges
        self.m = len(edges)
        self.labels = list(labels) if labels is not None else list(range(self.n))
        self.parent_ids = parent_ids
        self.load_stats = load_stats

        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        counts = np.bincount(src, minlength=self.n)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.edges.setflags(write=False)
        self.indices.setflags(write=False)
        self.indptr.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        pairs: Iterable[tuple[int, int]] | np.ndarray,
        labels: Optional[Sequence[Hashable]] = None,
    ) -> "Graph":
        """Build a graph from arbitrary pairs, dropping loops and duplicates."""
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                         dtype=np.int64).reshape(-1, 2)
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range")
        arr = arr[arr[:, 0] != arr[:, 1]]
        arr = np.sort(arr, axis=1)
        if len(arr):
            arr = np.unique(arr, axis=0)
        return cls(n, arr, labels)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    @cached_property
    def adj(self) -> list[list[int]]:
        """Plain-list adjacency, for pure Python traversals."""
        flat = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [flat[ptr[u]:ptr[u + 1]] for u in range(self.n)]

    @cached_property
    def adj_sets(self) -> list[set[int]]:
        return [set(nb) for nb in self.adj]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)


def load_edge_list(stream: TextIO | Iterable[str]) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` and blank lines are skipped.  Labels are
    mapped to internal ids in order of first appearance; canonical decimal
    tokens become ``int`` labels, everything else stays a string.
    """
    ids: dict[Hashable, int] = {}
    labels: list[Hashable] = []
    pairs: list[tuple[int, int]] = []
    lines = loops = 0
    for lineno, line in enumerate(stream, start=1):
        lines += 1
        text = line.strip()
        if not text or text[0] in "#%":
            continue
        tokens = text.split()
        if len(tokens) != 2:
            raise EdgeListParseError(lineno, line)
        ends = []
        for tok in tokens:
            label: Hashable = int(tok) if _INT_LABEL.match(tok) else tok
            if label not in ids:
                ids[label] = len(labels)
                labels.append(label)
            ends.append(ids[label])
        u, v = ends
        if u == v:
            loops += 1
            continue
        pairs.append((u, v) if u < v else (v, u))
    unique = sorted(set(pairs))
    stats = LoadStats(lines=lines, edges_read=len(pairs) + loops,
                      duplicates=len(pairs) - len(unique), self_loops=loops)
    g = Graph(len(labels), np.array(unique, dtype=np.int64).reshape(-1, 2), labels)
    g.load_stats = stats
    return g


def write_edge_list(g: Graph, stream: TextIO) -> None:
    for u, v in g.edges.tolist():
        stream.write(f"{g.labels[u]} {g.labels[v]}\n")


def as_vertex_set(s: Iterable[int], n: int) -> np.ndarray:
    """Sorted unique int64 array of vertex ids, range-checked against ``n``."""
    arr = np.unique(np.asarray(list(s) if not isinstance(s, np.ndarray) else s,
                               dtype=np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= n):
        raise ValueError(f"vertex id out of range for graph with n={n}")
    return arr


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    members = as_vertex_set(s, g.n)
    local = np.full(g.n, -1, dtype=np.int64)
    local[members] = np.arange(len(members))
    mapped = local[g.edges]
    keep = (mapped[:, 0] >= 0) & (mapped[:, 1] >= 0)
    sub = Graph(len(members), mapped[keep], [g.labels[u] for u in members.tolist()],
                parent_ids=members)
    return sub


def count_induced_edges(g: Graph, s: Iterable[int]) -> int:
    mask = np.zeros(g.n, dtype=bool)
    mask[as_vertex_set(s, g.n)] = True
    return int(np.count_nonzero(mask[g.edges[:, 0]] & mask[g.edges[:, 1]]))


def connected_components(g: Graph, within: Optional[Iterable[int]] = None) -> list[np.ndarray]:
    """Connected components ordered by smallest member.

    With ``within`` the components of the induced subgraph on those vertices
    are returned, in ``g``'s ids.
    """
    if within is None:
        allowed = None
        order = range(g.n)
    else:
        members = as_vertex_set(within, g.n)
        allowed = np.zeros(g.n, dtype=bool)
        allowed[members] = True
        order = members.tolist()
    adj = g.adj
    seen = np.zeros(g.n, dtype=bool) if allowed is None else ~allowed
    seen = seen.tolist()
    parts = []
    for root in order:
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        stack = [root]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        parts.append(np.array(sorted(comp), dtype=np.int64))
    return parts


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(connected_components(g)) == 1


def density(g: Graph) -> Fraction:
    if g.n == 0:
        raise ValueError("density of an empty graph is undefined")
    return Fraction(g.m, g.n)


@dataclass(frozen=True)
class TriangleIndex:
    """Triangles ``(a, b, c)`` with ``a < b < c`` in lexicographic order.

    ``inc_ptr``/``inc_idx`` hold, in CSR form, the indices of the triangles
    containing each vertex.
    """

    triangles: np.ndarray
    inc_ptr: np.ndarray
    inc_idx: np.ndarray

    def __len__(self) -> int:
        return len(self.triangles)

    def incidence(self, u: int) -> np.ndarray:
        return self.inc_idx[self.inc_ptr[u]:self.inc_ptr[u + 1]]

    @cached_property
    def counts(self) -> np.ndarray:
        return np.diff(self.inc_ptr)

    @classmethod
    def from_triangles(cls, n: int, triangles: np.ndarray) -> "TriangleIndex":
        tri = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        flat = tri.ravel()
        owner = np.repeat(np.arange(len(tri), dtype=np.int64), 3)
        order = np.lexsort((owner, flat))
        inc_idx = owner[order]
        inc_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(flat, minlength=n), out=inc_ptr[1:])
        return cls(tri, inc_ptr, inc_idx)


def enumerate_triangles(g: Graph) -> TriangleIndex:
    """List every triangle once using degree-ordered forward intersection."""
    deg = g.degrees.tolist()
    rank = sorted(range(g.n), key=lambda u: (deg[u], u))
    pos = [0] * g.n
    for i, u in enumerate(rank):
        pos[u] = i
    adj = g.adj
    out = [[w for w in adj[u] if pos[w] > pos[u]] for u in range(g.n)]
    out_sets = [set(x) for x in out]
    found = []
    for u in range(g.n):
        ou = out_sets[u]
        for v in out[u]:
            for w in out[v]:
                if w in ou:
                    found.append(tuple(sorted((u, v, w))))
    found.sort()
    tri = np.array(found, dtype=np.int64).reshape(-1, 3)
    return TriangleIndex.from_triangles(g.n, tri)


def tr_density(g: Graph, t: TriangleIndex) -> Fraction:
    if g.n == 0:
        raise ValueError("tr-density of an empty graph is undefined")
    return Fraction(len(t), g.n)


def core_decomposition(g: Graph) -> np.ndarray:
    """Core number of every vertex, by minimum-degree bucket peeling."""
    return peel_cores(g.n, g.edges, np.ones(g.n, dtype=bool))


def tr_core_decomposition(g: Graph, t: TriangleIndex) -> np.ndarray:
    """tr-core number of every vertex: peel the vertex in fewest live triangles."""
    return peel_cores(g.n, t.triangles, np.ones(g.n, dtype=bool))
