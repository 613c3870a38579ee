"""Top-k LDS / LTDS search.

The search keeps a priority queue of *regions*.  A region is a pattern
system over a vertex subset whose convex program has the same optimum as the
full one on those vertices, so every bound computed inside a region holds for
the whole graph.  Popping a region checks its live connected pieces as
candidates, then refines it: Frank-Wolfe, stable groups, pruning, and one
child region per group.  A region that will not split is settled exactly by a
flow-based densest-subsystem search.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Optional

import numpy as np

from . import flow
from ._kernels import peel_cores
from .frank_wolfe import DEFAULT_ITERS, Mode, PatternSystem, run_frank_wolfe
from .graph import Graph, TriangleIndex, enumerate_triangles, induced_subgraph
from .pruning import EPS, rule_one, rule_two
from .stable_groups import (BoundsTable, extract_system_groups, initial_bounds, split_system,
                            tighten_bounds)

log = logging.getLogger(__name__)

STAGES = ("fw", "extract", "prune", "verify")


class DriverProgressError(RuntimeError):
    """The outer loop exceeded its iteration cap."""


@dataclass(frozen=True)
class DenseRegion:
    rank: int
    vertices: list[Hashable]
    ids: list[int]
    density: Fraction
    edge_count: int
    triangle_count: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.ids)


@dataclass
class RunStats:
    timings: dict[str, float] = field(default_factory=lambda: {s: 0.0 for s in STAGES})
    total_time: float = 0.0
    failed: int = 0
    verifier_calls: int = 0
    densest_checks: int = 0
    fw_runs: int = 0
    fw_restarts: int = 0
    exact_splits: int = 0
    pruned_rule1: int = 0
    pruned_rule2: int = 0
    outer_iterations: int = 0
    networks: list[dict] = field(default_factory=list)
    completeness: str = "complete"

    def as_dict(self) -> dict:
        return {
            "timings": dict(self.timings),
            "total_time": self.total_time,
            "failed_candidates": self.failed,
            "verifier_calls": self.verifier_calls,
            "densest_checks": self.densest_checks,
            "fw_runs": self.fw_runs,
            "fw_restarts": self.fw_restarts,
            "exact_splits": self.exact_splits,
            "pruned_rule1": self.pruned_rule1,
            "pruned_rule2": self.pruned_rule2,
            "outer_iterations": self.outer_iterations,
            "networks": list(self.networks),
            "completeness": self.completeness,
        }


@dataclass
class _Region:
    system: PatternSystem
    level: Optional[Fraction] = None
    check: bool = True


def label_key(label: Hashable) -> tuple:
    """Sort key that orders ints before strings without comparing across types."""
    return (0, label, "") if isinstance(label, int) else (1, 0, str(label))


class _Search:
    def __init__(self, g: Graph, mode: Mode, k: int, iters: int, variant: str,
                 t: Optional[TriangleIndex], max_outer: Optional[int]):
        self.g = g
        self.mode = mode
        self.k = k
        self.iters = iters
        self.variant = variant
        self.t = t
        self.stats = RunStats()
        self.adj = g.adj
        self.alive = np.ones(g.n, dtype=bool)
        self.bounds = initial_bounds(g, mode, t)
        self.hyper = g.edges if mode == "edge" else t.triangles
        self.results: list[tuple[Fraction, list[int], int, Optional[int]]] = []
        self.seen: set[frozenset] = set()
        self.heap: list = []
        self.counter = itertools.count()
        self.max_outer = max_outer if max_outer is not None else 10 * max(g.n, 1)
        if mode == "triangle":
            self.tri_list = [tuple(x) for x in t.triangles.tolist()]
            self.tri_inc = [t.incidence(u).tolist() for u in range(g.n)]

    # -- queue -------------------------------------------------------------
    def push(self, region: _Region) -> None:
        verts = region.system.vertices
        live = verts[self.alive[verts]]
        if len(live) == 0:
            return
        key = float(self.bounds.phi_upper[live].max())
        heapq.heappush(self.heap, (-key, next(self.counter), region))

    def kth_density(self) -> Optional[Fraction]:
        if len(self.results) < self.k:
            return None
        return sorted((r[0] for r in self.results), reverse=True)[self.k - 1]

    # -- candidates --------------------------------------------------------
    def components(self, live: np.ndarray) -> list[list[int]]:
        inside = set(live.tolist())
        adj = self.adj
        parts = []
        for root in live.tolist():
            if root not in inside:
                continue
            inside.discard(root)
            comp = [root]
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if w in inside:
                        inside.discard(w)
                        comp.append(w)
                        queue.append(w)
            comp.sort()
            parts.append(comp)
        return parts

    def local_patterns(self, comp: list[int]) -> tuple[np.ndarray, int]:
        """Patterns of G[comp] in local indices, plus the edge count."""
        index = {u: i for i, u in enumerate(comp)}
        adj = self.adj
        edges = [(index[u], index[w]) for u in comp for w in adj[u] if w > u and w in index]
        if self.mode == "edge":
            return np.array(edges, dtype=np.int64).reshape(-1, 2), len(edges)
        tris = []
        for u in comp:
            for ti in self.tri_inc[u]:
                a, b, c = self.tri_list[ti]
                if a == u and b in index and c in index:
                    tris.append((index[a], index[b], index[c]))
        return np.array(tris, dtype=np.int64).reshape(-1, 3), len(edges)

    def self_densest(self, comp: list[int], pats: np.ndarray, rho: Fraction) -> bool:
        n = len(comp)
        counts = np.bincount(pats.ravel(), minlength=n)
        # dropping a vertex in fewer than rho patterns raises the density
        if counts.min() * rho.denominator < rho.numerator:
            return False
        if self.mode == "edge" and n > 64 and flow.peel_denser(self.adj, comp):
            return False
        self.stats.densest_checks += 1
        return flow._self_densest(n, pats, pats.shape[1])

    def check_candidates(self, region: _Region) -> None:
        verts = region.system.vertices
        live = verts[self.alive[verts]]
        upper, lower = self.bounds.phi_upper, self.bounds.phi_lower
        for comp in self.components(live):
            pats, m_edges = self.local_patterns(comp)
            if len(pats) == 0:
                self.alive[comp] = False
                continue
            key = frozenset(comp)
            if key in self.seen:
                continue
            self.seen.add(key)
            rho = Fraction(len(pats), len(comp))
            if region.level is not None:
                if rho != region.level:
                    continue
            else:
                idx = np.asarray(comp)
                lo, hi = float(rho) - EPS, float(rho) + EPS
                if (upper[idx] < lo).any() or (lower[idx] > hi).any():
                    continue
                t0 = time.perf_counter()
                dense = self.self_densest(comp, pats, rho)
                self.stats.timings["verify"] += time.perf_counter() - t0
                if not dense:
                    continue
            t0 = time.perf_counter()
            if self.mode == "edge":
                outcome = flow.verify_lds(self.g, comp, self.bounds, self.variant, rho)
            else:
                outcome = flow.verify_ltds(self.g, self.t, comp, self.bounds, self.variant, rho)
            self.stats.timings["verify"] += time.perf_counter() - t0
            self.stats.verifier_calls += 1
            self.stats.networks.append({"size": len(comp), "nodes": outcome.nodes,
                                        "arcs": outcome.arcs, "flow": outcome.used_flow})
            if not outcome.ok:
                self.stats.failed += 1
                continue
            self.alive[comp] = False
            tri = len(pats) if self.mode == "triangle" else None
            self.results.append((rho, comp, m_edges, tri))
            log.debug("accepted %d vertices at %s", len(comp), rho)

    # -- refinement --------------------------------------------------------
    def prune_region(self, verts: np.ndarray) -> None:
        t0 = time.perf_counter()
        first = rule_one(self.g, self.bounds, self.alive)
        self.alive[first] = False
        region_alive = np.zeros(self.g.n, dtype=bool)
        region_alive[verts] = self.alive[verts]
        second = rule_two(self.hyper, self.g.n, self.bounds, region_alive)
        self.alive[second] = False
        self.stats.pruned_rule1 += len(first)
        self.stats.pruned_rule2 += len(second)
        self.stats.timings["prune"] += time.perf_counter() - t0

    def exact_split(self, region: _Region) -> None:
        """Settle a region that Frank-Wolfe will not split.

        Dinkelbach iterations on the pattern network find the densest
        sub-system; its maximal optimiser is the set of vertices with the
        largest compact number, which becomes a level region.
        """
        system = region.system
        self.stats.exact_splits += 1
        n, members = system.n, system.members
        if system.size == 0:
            self.alive[system.vertices] = False
            return
        rho = Fraction(system.size, n)
        t0 = time.perf_counter()
        while True:
            cut = flow.pattern_cut(n, members, rho.numerator, rho.denominator)
            inside = cut.inside
            if cut.value == rho.denominator * system.size:
                break
            ext = np.append(inside, True)
            t_in = int(ext[members].all(axis=1).sum())
            rho = Fraction(t_in, int(inside.sum()))
        self.stats.timings["verify"] += time.perf_counter() - t0
        top = float(rho)
        gids = system.vertices
        if inside.all():
            self.bounds.phi_upper[gids] = top
            self.bounds.phi_lower[gids] = top
            self.push(_Region(system, level=rho))
            return
        block = np.where(inside, 0, 1)
        upper_sys, lower_sys = split_system(system, block, 2)
        self.bounds.phi_upper[upper_sys.vertices] = top
        self.bounds.phi_lower[upper_sys.vertices] = top
        rest = lower_sys.vertices
        self.bounds.phi_upper[rest] = np.minimum(self.bounds.phi_upper[rest], top)
        self.bounds.phi_lower[rest] = np.minimum(self.bounds.phi_lower[rest], self.bounds.phi_upper[rest])
        caps = self.bounds.strict_upper
        for u in rest.tolist():
            if u not in caps or rho < caps[u]:
                caps[u] = rho
        self.push(_Region(upper_sys, level=rho))
        self.push(_Region(lower_sys))

    def refine(self, region: _Region) -> None:
        system = region.system
        iters = self.iters
        for attempt in range(3):
            t0 = time.perf_counter()
            state = run_frank_wolfe(system, iters, self.mode)
            t1 = time.perf_counter()
            grouping = extract_system_groups(system, state)
            tighten_bounds(self.bounds, system, grouping)
            t2 = time.perf_counter()
            self.stats.timings["fw"] += t1 - t0
            self.stats.timings["extract"] += t2 - t1
            self.stats.fw_runs += 1
            self.prune_region(system.vertices)
            if grouping.count > 1:
                for child in split_system(system, grouping.block, grouping.count):
                    self.push(_Region(child))
                return
            if not self.alive[system.vertices].any():
                return
            self.stats.fw_restarts += 1
            iters *= 2
        self.exact_split(region)

    # -- main loop ---------------------------------------------------------
    def run(self, root: PatternSystem) -> None:
        self.push(_Region(root, check=False))
        while self.heap:
            key = -self.heap[0][0]
            kth = self.kth_density()
            if kth is not None and float(kth) > key + EPS:
                break
            _, _, region = heapq.heappop(self.heap)
            self.stats.outer_iterations += 1
            if self.stats.outer_iterations > self.max_outer:
                raise DriverProgressError(
                    f"no convergence after {self.max_outer} outer iterations "
                    f"({len(self.results)} regions found, {len(self.heap)} queued)")
            verts = region.system.vertices
            if not self.alive[verts].any():
                continue
            if region.check:
                self.check_candidates(region)
                if region.level is not None:
                    # every candidate in a level region is a whole live component
                    self.alive[verts] = False
                    continue
                if not self.alive[verts].any():
                    continue
            self.refine(region)
        if len(self.results) < self.k:
            self.stats.completeness = "exhausted"


def _topk(g: Graph, k: int, iters: Optional[int], mode: Mode, variant: str, fast: bool,
          t: Optional[TriangleIndex], max_outer: Optional[int]) -> tuple[list[DenseRegion], RunStats]:
    if k < 1:
        raise ValueError("k must be >= 1")
    if iters is None:
        iters = DEFAULT_ITERS[mode]
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if variant not in ("bounded", "core"):
        raise ValueError(f"unknown verifier variant {variant!r}")
    start = time.perf_counter()
    work, back = g, None
    if mode == "triangle" and t is None:
        t = enumerate_triangles(g)
    if fast and g.n:
        hyper = g.edges if mode == "edge" else t.triangles
        cores = peel_cores(g.n, hyper, np.ones(g.n, dtype=bool))
        keep = np.flatnonzero(cores >= math.ceil(cores.max() / 2))
        work = induced_subgraph(g, keep)
        back = keep
        if mode == "triangle":
            t = enumerate_triangles(work)
    search = _Search(work, mode, k, iters, variant, t, max_outer)
    if work.n:
        search.run(PatternSystem.from_graph(work, mode, t))
    else:
        search.stats.completeness = "exhausted"

    def original(ids: list[int]) -> list[int]:
        return ids if back is None else back[ids].tolist()

    found = []
    for rho, comp, m_edges, tri in search.results:
        ids = original(comp)
        found.append((rho, ids, m_edges, tri))
    found.sort(key=lambda r: (-r[0], min(label_key(g.labels[u]) for u in r[1])))
    regions = [DenseRegion(i + 1, [g.labels[u] for u in ids], ids, rho, m_edges, tri)
               for i, (rho, ids, m_edges, tri) in enumerate(found[:k])]
    stats = search.stats
    stats.total_time = time.perf_counter() - start
    return regions, stats


def lds_topk(g: Graph, k: int, iters: Optional[int] = None, variant: str = "bounded",
             fast: bool = False, max_outer: Optional[int] = None) -> tuple[list[DenseRegion], RunStats]:
    """Top-k locally densest subgraphs, densest first."""
    return _topk(g, k, iters, "edge", variant, fast, None, max_outer)


def ltds_topk(g: Graph, k: int, iters: Optional[int] = None, variant: str = "bounded",
              fast: bool = False, t: Optional[TriangleIndex] = None,
              max_outer: Optional[int] = None) -> tuple[list[DenseRegion], RunStats]:
    """Top-k locally triangle-densest subgraphs, by tr-density."""
    return _topk(g, k, iters, "triangle", variant, fast, t, max_outer)
