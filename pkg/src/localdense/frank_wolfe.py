"""Frank-Wolfe iterations for the edge and triangle convex programs.

Both programs are instances of one load-balancing problem over a *pattern
system*: every pattern (an edge, a triangle, or a one-vertex loop left over
from a higher region) carries one unit of weight that is split among its
members, and we minimise the sum of squared vertex loads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._kernels import fw_steps
from .graph import Graph, TriangleIndex

Mode = Literal["edge", "triangle"]

DEFAULT_ITERS = {"edge": 100, "triangle": 200}


@dataclass(frozen=True)
class PatternSystem:
    """Patterns over a vertex subset.

    ``vertices`` holds sorted global vertex ids.  ``members`` is a ``(P, w)``
    array of local indices, each row strictly increasing and right-padded with
    ``len(vertices)``.
    """

    vertices: np.ndarray
    members: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def width(self) -> int:
        return self.members.shape[1]

    def real_mask(self) -> np.ndarray:
        return self.members < self.n

    def sizes(self) -> np.ndarray:
        return self.real_mask().sum(axis=1)

    @classmethod
    def from_graph(cls, g: Graph, mode: Mode, t: TriangleIndex | None = None) -> "PatternSystem":
        if mode == "edge":
            members = g.edges.copy()
        else:
            if t is None:
                raise ValueError("triangle mode needs a TriangleIndex")
            members = t.triangles.copy()
        width = 2 if mode == "edge" else 3
        return cls(np.arange(g.n, dtype=np.int64), members.reshape(-1, width))


@dataclass(frozen=True)
class CPState:
    """A feasible point of the convex program.

    ``alpha[p, j]`` is the share pattern ``p`` gives to its ``j``-th member
    (zero on padding); ``r`` is the load of every local vertex.
    """

    mode: Mode
    alpha: np.ndarray
    r: np.ndarray
    iters: int = 0


def uniform_start(system: PatternSystem) -> tuple[np.ndarray, np.ndarray]:
    real = system.real_mask()
    sizes = real.sum(axis=1)
    alpha = np.where(real, 1.0 / np.maximum(sizes, 1)[:, None], 0.0)
    r = np.bincount(system.members[real], weights=alpha[real], minlength=system.n + 1)[:system.n]
    return alpha, r


def run_frank_wolfe(system: PatternSystem, iters: int, mode: Mode = "edge") -> CPState:
    """``iters`` Frank-Wolfe steps from the uniform split; step i = 1, 2, ... uses 2/(i+2).

    The linear oracle sends each pattern's unit to its least-loaded member;
    rows are sorted so the first minimum is the member with the smaller id.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    alpha, r = uniform_start(system)
    if system.size:
        fw_steps(np.ascontiguousarray(system.members), system.n, alpha, r, 1, iters)
    return CPState(mode, alpha, r, iters)


def fw_edge(g: Graph, iters: int = DEFAULT_ITERS["edge"]) -> CPState:
    """Edge program; ``alpha[e]`` holds (share to u, share to v) for edge (u, v)."""
    return run_frank_wolfe(PatternSystem.from_graph(g, "edge"), iters, "edge")


def fw_triangle(g: Graph, t: TriangleIndex, iters: int = DEFAULT_ITERS["triangle"]) -> CPState:
    return run_frank_wolfe(PatternSystem.from_graph(g, "triangle", t), iters, "triangle")


def objective(state: CPState) -> float:
    return float(np.dot(state.r, state.r))
