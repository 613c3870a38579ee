import random
from fractions import Fraction

import numpy as np
import pytest

from graphs import bridge, clique, k5_k4, random_graph, star
from localdense.frank_wolfe import PatternSystem, fw_edge, fw_triangle
from localdense.graph import Graph, enumerate_triangles
from localdense.oracle import compact_numbers_bf
from localdense.stable_groups import (candidate_boundaries, extract_stable_groups,
                                      extract_system_groups, initial_bounds, split_system)


def groups_of(g, mode, iters):
    t = enumerate_triangles(g) if mode == "triangle" else None
    state = fw_edge(g, iters) if mode == "edge" else fw_triangle(g, t, iters)
    return extract_stable_groups(g, state, initial_bounds(g, mode, t), t)


def test_boundaries_k5_k4_optimal_loads():
    r = np.array([2.0] * 5 + [1.5] * 4)
    assert candidate_boundaries(k5_k4(), r) == [5, 9]


def test_boundaries_single_clique_and_edgeless():
    assert candidate_boundaries(clique(6), np.full(6, 2.5)) == [6]
    assert candidate_boundaries(Graph.from_edges(3, []), np.zeros(3)) == [3]
    assert candidate_boundaries(Graph.from_edges(0, []), np.zeros(0)) == []


def test_boundaries_bridge_prefix_densities():
    # prefix densities 0, 1/2, 1, 3/2, 2, 11/6, 12/7, 7/4, 17/9: only the K5 prefix
    # and the whole graph beat every longer prefix
    r = np.array([2.0] * 5 + [1.75] * 4)
    assert candidate_boundaries(bridge(), r) == [5, 9]


def test_extract_k5_k4():
    groups, b = groups_of(k5_k4(), "edge", 2000)
    assert [g.members.tolist() for g in groups] == [[0, 1, 2, 3, 4], [5, 6, 7, 8]]
    assert groups[0].r_min == pytest.approx(2, abs=1e-3) and groups[0].r_max == pytest.approx(2, abs=1e-3)
    assert groups[1].r_min == pytest.approx(1.5, abs=1e-3)
    np.testing.assert_allclose(b.phi_upper, [2] * 5 + [1.5] * 4, atol=1e-3)
    np.testing.assert_allclose(b.phi_lower, [2] * 5 + [1.5] * 4, atol=1e-3)


def test_extract_single_edge():
    g = Graph.from_edges(2, [(0, 1)])
    groups, b = groups_of(g, "edge", 1000)
    assert len(groups) == 1
    np.testing.assert_allclose(b.phi_lower, 0.5, atol=1e-3)
    np.testing.assert_allclose(b.phi_upper, 0.5, atol=1e-3)


def test_extract_bridge():
    groups, b = groups_of(bridge(), "edge", 2000)
    assert [g.members.tolist() for g in groups] == [[0, 1, 2, 3, 4], [5, 6, 7, 8]]
    want = [2] * 5 + [1.75] * 4
    np.testing.assert_allclose(b.phi_upper, want, atol=1e-2)
    np.testing.assert_allclose(b.phi_lower, want, atol=1e-2)


def test_extract_triangle_mode_k5_k4():
    groups, b = groups_of(k5_k4(), "triangle", 2000)
    assert [g.members.tolist() for g in groups] == [[0, 1, 2, 3, 4], [5, 6, 7, 8]]
    np.testing.assert_allclose(b.phi_upper, [2] * 5 + [1] * 4, atol=1e-2)


def test_initial_bounds_are_core_numbers():
    b = initial_bounds(star(3))
    assert b.phi_upper.tolist() == [1, 1, 1, 1] and b.phi_lower.tolist() == [0] * 4
    b = initial_bounds(clique(5), "triangle")
    assert b.phi_upper.tolist() == [6] * 5


def _check_grouping(g, mode, iters):
    t = enumerate_triangles(g) if mode == "triangle" else None
    system = PatternSystem.from_graph(g, mode, t)
    state = fw_edge(g, iters) if mode == "edge" else fw_triangle(g, t, iters)
    grouping = extract_system_groups(system, state)
    block = grouping.block
    # partition into contiguous, non-empty groups
    assert sorted(set(block.tolist())) == list(range(grouping.count))
    # modified state keeps every unit
    assert grouping.r.sum() == pytest.approx(system.size, abs=1e-6)
    # strict separation of every group's load range from every other vertex
    for b in range(grouping.count):
        inside = block == b
        lo, hi = grouping.r[inside].min(), grouping.r[inside].max()
        assert lo == grouping.r_min[b] and hi == grouping.r_max[b]
        outside = grouping.r[~inside]
        assert ((outside < lo) | (outside > hi)).all()
    return grouping


def test_grouping_invariants_random():
    rng = random.Random(21)
    for _ in range(40):
        g = random_graph(rng, rng.randint(3, 14), rng.choice([0.3, 0.5]), connected=False)
        for iters in (1, 5, 100):
            _check_grouping(g, "edge", iters)
            if len(enumerate_triangles(g)):
                _check_grouping(g, "triangle", iters)


@pytest.mark.parametrize("mode", ["edge", "triangle"])
def test_bounds_sandwich_oracle(mode):
    rng = random.Random(4 if mode == "edge" else 9)
    for _ in range(15):
        g = random_graph(rng, rng.randint(4, 10), 0.5, need_triangle=mode == "triangle")
        phi = np.array([float(x) for x in compact_numbers_bf(g, mode)])
        for iters in (50, 2000):
            _, b = groups_of(g, mode, iters)
            assert (b.phi_lower - 1e-6 <= phi).all()
            assert (phi <= b.phi_upper + 1e-6).all()


def test_split_system_keeps_lowest_block_members():
    g = bridge()
    system = PatternSystem.from_graph(g, "edge")
    block = np.array([0] * 5 + [1] * 4)
    top, rest = split_system(system, block, 2)
    assert top.vertices.tolist() == [0, 1, 2, 3, 4] and top.size == 10
    # the bridge edge (4, 5) becomes a loop on vertex 5
    assert rest.size == 7
    loops = rest.members[rest.members[:, 1] == rest.n]
    assert rest.vertices[loops[:, 0]].tolist() == [5]


def test_child_system_optimum_matches_global():
    # the bottom system of the bridge graph has optimum load 7/4 everywhere
    from localdense.frank_wolfe import run_frank_wolfe
    system = PatternSystem.from_graph(bridge(), "edge")
    _, rest = split_system(system, np.array([0] * 5 + [1] * 4), 2)
    r = run_frank_wolfe(rest, 4000).r
    np.testing.assert_allclose(r, float(Fraction(7, 4)), atol=1e-2)
