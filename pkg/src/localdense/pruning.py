"""Bound-based vertex pruning."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ._kernels import peel_cores
from .frank_wolfe import Mode
from .graph import Graph, TriangleIndex, enumerate_triangles
from .stable_groups import BoundsTable, StableGroup

EPS = 1e-7


def rule_one(g: Graph, bounds: BoundsTable, alive: np.ndarray) -> np.ndarray:
    """Live vertices with a neighbour whose lower bound beats their upper bound."""
    if g.m == 0:
        return np.zeros(0, dtype=np.int64)
    u, v = g.edges[:, 0], g.edges[:, 1]
    hi, lo = bounds.phi_upper, bounds.phi_lower
    bad = np.zeros(g.n, dtype=bool)
    bad[u[hi[u] < lo[v] - EPS]] = True
    bad[v[hi[v] < lo[u] - EPS]] = True
    return np.flatnonzero(bad & alive)


def rule_two(hyperedges: np.ndarray, n: int, bounds: BoundsTable, alive: np.ndarray) -> np.ndarray:
    """Peel ``alive`` in place until every survivor's residual core number
    reaches its lower bound; returns the removed vertices."""
    lower = bounds.phi_lower
    removed = []
    while alive.any():
        cores = peel_cores(n, hyperedges, alive)
        bad = alive & (cores < lower - EPS)
        if not bad.any():
            break
        alive[bad] = False
        removed.append(np.flatnonzero(bad))
    return np.concatenate(removed) if removed else np.zeros(0, dtype=np.int64)


def prune_mask(g: Graph, bounds: BoundsTable, alive: np.ndarray, mode: Mode,
               t: Optional[TriangleIndex] = None) -> tuple[np.ndarray, np.ndarray]:
    """Apply both rules to the live vertices of ``alive`` (modified in place).

    Returns the vertices removed by rule one and by rule two.
    """
    first = rule_one(g, bounds, alive)
    alive[first] = False
    hyper = g.edges if mode == "edge" else t.triangles
    second = rule_two(hyper, g.n, bounds, alive)
    return first, second


def prune(g: Graph, groups: Sequence[StableGroup], bounds: BoundsTable, mode: Mode = "edge",
          t: Optional[TriangleIndex] = None) -> tuple[np.ndarray, list[StableGroup]]:
    """Residual vertex set and the groups restricted to it (empty ones dropped)."""
    if mode == "triangle" and t is None:
        t = enumerate_triangles(g)
    alive = np.ones(g.n, dtype=bool)
    prune_mask(g, bounds, alive, mode, t)
    kept = []
    for grp in groups:
        members = grp.members[alive[grp.members]]
        if len(members):
            kept.append(StableGroup(members, grp.r_min, grp.r_max))
    return np.flatnonzero(alive), kept
