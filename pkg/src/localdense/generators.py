"""Synthetic graphs."""

from __future__ import annotations

import random

import numpy as np

from .graph import Graph


def barabasi_albert_edges(n: int, attach_m: int, seed: int = 0) -> list[tuple[int, int]]:
    """Preferential attachment grown from a clique of ``attach_m + 1`` vertices.

    Every later vertex links to ``attach_m`` distinct earlier vertices drawn
    with probability proportional to degree.  The edge count is
    ``C(attach_m + 1, 2) + attach_m * (n - attach_m - 1)``.
    """
    if attach_m < 1 or n <= attach_m:
        raise ValueError(f"need n > attach_m >= 1 (got n={n}, attach_m={attach_m})")
    rng = random.Random(seed)
    core = attach_m + 1
    edges = [(i, j) for i in range(core) for j in range(i + 1, core)]
    # each vertex appears once per incident edge, so uniform draws are degree-weighted
    repeated = [v for e in edges for v in e]
    for v in range(core, n):
        targets: set[int] = set()
        while len(targets) < attach_m:
            targets.add(repeated[rng.randrange(len(repeated))])
        for w in sorted(targets):
            edges.append((w, v))
            repeated.append(w)
            repeated.append(v)
    return edges


def barabasi_albert(n: int, attach_m: int, seed: int = 0) -> Graph:
    edges = np.array(barabasi_albert_edges(n, attach_m, seed), dtype=np.int64)
    return Graph.from_edges(n, edges)
