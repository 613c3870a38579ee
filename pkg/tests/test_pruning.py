import random

import numpy as np

from graphs import bridge, exact_bounds, k5_k4, random_graph, star
from localdense.graph import enumerate_triangles, induced_subgraph
from localdense.oracle import enumerate_lds_bf
from localdense.pruning import EPS, prune, prune_mask, rule_one
from localdense.stable_groups import BoundsTable, StableGroup
from localdense._kernels import peel_cores


def whole(g):
    return [StableGroup(np.arange(g.n), 0.0, 0.0)]


def test_disjoint_cliques_nothing_pruned():
    g = k5_k4()
    residual, groups = prune(g, whole(g), exact_bounds(g))
    assert residual.tolist() == list(range(9))
    assert len(groups) == 1


def test_bridge_endpoint_pruned_by_rule_one():
    g = bridge()
    b = exact_bounds(g)
    assert rule_one(g, b, np.ones(g.n, dtype=bool)).tolist() == [5]
    groups = [StableGroup(np.arange(5), 2.0, 2.0), StableGroup(np.arange(5, 9), 1.75, 1.75)]
    residual, kept = prune(g, groups, b)
    assert residual.tolist() == [0, 1, 2, 3, 4, 6, 7, 8]
    assert [k.members.tolist() for k in kept] == [[0, 1, 2, 3, 4], [6, 7, 8]]


def test_star_uniform_bounds():
    g = star(3)
    b = exact_bounds(g)
    np.testing.assert_allclose(b.phi_upper, 0.75)
    residual, _ = prune(g, whole(g), b)
    assert residual.tolist() == [0, 1, 2, 3]


def test_empty_groups_dropped():
    g = bridge()
    groups = [StableGroup(np.arange(5), 2.0, 2.0), StableGroup(np.array([5]), 1.75, 1.75)]
    _, kept = prune(g, groups, exact_bounds(g))
    assert len(kept) == 1


def _pruned(g, b, mode):
    t = enumerate_triangles(g) if mode == "triangle" else None
    alive = np.ones(g.n, dtype=bool)
    prune_mask(g, b, alive, mode, t)
    return alive


def test_soundness_with_exact_bounds():
    rng = random.Random(17)
    for mode in ("edge", "triangle"):
        for _ in range(40):
            g = random_graph(rng, rng.randint(4, 10), rng.choice([0.3, 0.5]), connected=False)
            alive = _pruned(g, exact_bounds(g, mode), mode)
            for members, _ in enumerate_lds_bf(g, mode):
                assert alive[members].all()


def test_rule_two_fixpoint():
    rng = random.Random(8)
    for mode in ("edge", "triangle"):
        for _ in range(40):
            g = random_graph(rng, rng.randint(4, 10), 0.5, connected=False)
            b = exact_bounds(g, mode)
            alive = _pruned(g, b, mode)
            hyper = g.edges if mode == "edge" else enumerate_triangles(g).triangles
            cores = peel_cores(g.n, hyper, alive)
            assert (cores[alive] >= b.phi_lower[alive] - EPS).all()


def test_monotone_in_bounds():
    rng = random.Random(12)
    for _ in range(40):
        g = random_graph(rng, rng.randint(4, 10), 0.5)
        tight = exact_bounds(g)
        loose = BoundsTable(tight.phi_upper + np.array([rng.random() for _ in range(g.n)]),
                            np.maximum(tight.phi_lower - np.array([rng.random() for _ in range(g.n)]), 0))
        assert not (~_pruned(g, loose, "edge") & _pruned(g, tight, "edge")).any()


def test_core_numbers_of_residual_graph():
    # rule two looks at the residual graph, not the original one
    g = bridge()
    b = BoundsTable(np.full(9, 4.0), np.array([0, 0, 0, 0, 0, 0, 0, 0, 2.5]))
    alive = np.ones(9, dtype=bool)
    alive[5] = False
    prune_mask(g, b, alive, "edge")
    sub = induced_subgraph(g, [6, 7, 8])
    assert sub.degrees.max() == 2 and not alive[8]
