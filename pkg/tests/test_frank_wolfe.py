import random

import numpy as np
import pytest

from graphs import clique, k5_k4, random_graph, triangle
from localdense.frank_wolfe import (CPState, PatternSystem, fw_edge, fw_triangle, objective,
                                    run_frank_wolfe)
from localdense.graph import Graph, enumerate_triangles
from localdense.oracle import compact_numbers_bf


def assert_feasible(state: CPState, members: np.ndarray, total: int):
    assert (state.alpha >= -1e-12).all()
    np.testing.assert_allclose(state.alpha.sum(axis=1), 1.0, atol=1e-9)
    r = np.bincount(members.ravel(), weights=state.alpha.ravel(), minlength=len(state.r))
    np.testing.assert_allclose(state.r, r[:len(state.r)], atol=1e-9)
    assert abs(state.r.sum() - total) <= 1e-6 * max(total, 1)


def test_single_edge_first_steps():
    # the uniform split is optimal, but the direction step breaks the tie toward
    # vertex 0, so the iterates oscillate around (1/2, 1/2) and shrink toward it
    g = Graph.from_edges(2, [(0, 1)])
    np.testing.assert_allclose(fw_edge(g, 1).r, [5 / 6, 1 / 6])
    np.testing.assert_allclose(fw_edge(g, 2).r, [5 / 12, 7 / 12])
    for iters in (100, 1000):
        assert np.abs(fw_edge(g, iters).r - 0.5).max() <= 1 / iters


def test_triangle_converges_to_uniform_load():
    np.testing.assert_allclose(fw_edge(triangle(), 1).r, [5 / 3, 1, 1 / 3])
    for iters in (200, 2000):
        assert np.abs(fw_edge(triangle(), iters).r - 1).max() <= 1 / iters


def test_k5_k4_edge_mode_near_compact_numbers():
    r = fw_edge(k5_k4(), 100).r
    assert np.abs(r[:5] - 2.0).max() < 0.05
    assert np.abs(r[5:] - 1.5).max() < 0.05


def test_triangle_mode_examples():
    t = enumerate_triangles(triangle())
    assert np.abs(fw_triangle(triangle(), t, 2000).r - 1 / 3).max() < 1e-3
    k4 = clique(4)
    assert np.abs(fw_triangle(k4, enumerate_triangles(k4), 2000).r - 1).max() < 1e-2
    g = k5_k4()
    r = fw_triangle(g, enumerate_triangles(g), 200).r
    assert np.abs(r[:5] - 2.0).max() < 0.05
    assert np.abs(r[5:] - 1.0).max() < 0.05


def test_objective_examples():
    assert objective(fw_edge(triangle(), 2000)) == pytest.approx(3.0, abs=1e-5)
    assert objective(fw_edge(clique(4), 2000)) == pytest.approx(9.0, abs=1e-5)
    # objective decreases along the run on these symmetric graphs
    assert objective(fw_edge(triangle(), 10)) > objective(fw_edge(triangle(), 200)) > 3.0
    assert objective(fw_edge(k5_k4(), 5000)) == pytest.approx(29.0, abs=1e-2)


def test_feasible_every_iteration():
    rng = random.Random(11)
    for _ in range(10):
        g = random_graph(rng, rng.randint(4, 10), 0.5)
        t = enumerate_triangles(g)
        for iters in list(range(1, 11)) + [300]:
            assert_feasible(fw_edge(g, iters), g.edges, g.m)
            if len(t):
                assert_feasible(fw_triangle(g, t, iters), t.triangles, len(t))


def test_objective_never_below_optimum():
    rng = random.Random(5)
    for _ in range(10):
        g = random_graph(rng, rng.randint(4, 9))
        floor = float(sum(x * x for x in compact_numbers_bf(g)))
        for iters in (1, 3, 10, 100, 1000):
            assert objective(fw_edge(g, iters)) >= floor - 1e-6


def test_deterministic():
    g = random_graph(random.Random(2), 10)
    assert fw_edge(g, 123).r.tobytes() == fw_edge(g, 123).r.tobytes()


def test_tie_goes_to_smaller_id():
    # both endpoints tie at the uniform start; the first step favours vertex 0
    g = Graph.from_edges(2, [(0, 1)])
    state = fw_edge(g, 1)
    assert state.alpha[0, 0] > state.alpha[0, 1]


def test_loops_in_pattern_system():
    # one loop on vertex 0 plus an edge: optimum r = (1, 1)
    system = PatternSystem(np.arange(2), np.array([[0, 2], [0, 1]]))
    r = run_frank_wolfe(system, 2000).r
    np.testing.assert_allclose(r, [1, 1], atol=1e-2)


def test_rejects_zero_iterations():
    with pytest.raises(ValueError):
        fw_edge(triangle(), 0)


def test_empty_graph():
    state = fw_edge(Graph.from_edges(0, []), 5)
    assert len(state.r) == 0
