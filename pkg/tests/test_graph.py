import io
import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphs import clique, k4_pendant, k5_k4, bridge, path, star, triangle
from localdense.graph import (EdgeListParseError, Graph, connected_components, core_decomposition,
                              count_induced_edges, density, enumerate_triangles, induced_subgraph,
                              load_edge_list, tr_core_decomposition, tr_density)


def load(text):
    return load_edge_list(io.StringIO(text))


def test_load_triangle():
    g = load("0 1\n1 2\n2 0")
    assert (g.n, g.m) == (3, 3)


def test_load_drops_duplicates_and_loops():
    g = load("0 1\n1 0\n0 0")
    assert (g.n, g.m) == (2, 1)
    assert g.edges.tolist() == [[0, 1]]
    assert g.load_stats.duplicates == 1 and g.load_stats.self_loops == 1


def test_load_k5_file():
    text = "\n".join(f"{u} {v}" for u, v in combinations(range(5), 2))
    g = load(text)
    assert (g.n, g.m) == (5, 10)


def test_load_labels_first_appearance_and_comments():
    g = load("# header\n% other\n\n10 alice\nalice 007\n")
    assert g.labels == [10, "alice", "007"]
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_load_parse_error_line_number():
    with pytest.raises(EdgeListParseError) as err:
        load("0 1\n1 2 3\n")
    assert err.value.lineno == 2


def test_load_empty():
    g = load("")
    assert (g.n, g.m) == (0, 0)


def test_graph_invariants():
    g = bridge()
    assert g.m == len(g.edges) == g.degrees.sum() // 2
    for u in range(g.n):
        nb = g.neighbors(u)
        assert (np.diff(nb) > 0).all()
        for v in nb:
            assert u in g.neighbors(v)


def test_induced_subgraph_examples():
    sub = induced_subgraph(k5_k4(), range(5, 9))
    assert (sub.n, sub.m) == (4, 6)
    assert sub.parent_ids.tolist() == [5, 6, 7, 8]
    assert induced_subgraph(k4_pendant(), [0, 1, 2, 3]).m == 6
    single = induced_subgraph(triangle(), [0])
    assert (single.n, single.m) == (1, 0)


def test_induced_subgraph_out_of_range():
    with pytest.raises(ValueError):
        induced_subgraph(triangle(), [0, 3])


def test_components():
    parts = connected_components(k5_k4())
    assert [len(p) for p in parts] == [5, 4]
    assert [len(p) for p in connected_components(bridge())] == [9]
    assert connected_components(Graph.from_edges(0, [])) == []


def test_density_examples():
    assert density(clique(5)) == Fraction(2)
    assert density(clique(4)) == Fraction(3, 2)
    assert density(k4_pendant()) == Fraction(7, 5)
    with pytest.raises(ValueError):
        density(Graph.from_edges(0, []))


def test_triangles_examples():
    assert len(enumerate_triangles(clique(4))) == 4
    assert len(enumerate_triangles(clique(5))) == 10
    assert len(enumerate_triangles(star(3))) == 0


def test_tr_density_examples():
    assert tr_density(clique(5), enumerate_triangles(clique(5))) == 2
    assert tr_density(clique(4), enumerate_triangles(clique(4))) == 1
    assert tr_density(triangle(), enumerate_triangles(triangle())) == Fraction(1, 3)


def test_core_examples():
    assert core_decomposition(k4_pendant()).tolist() == [3, 3, 3, 3, 1]
    assert core_decomposition(path(3)).tolist() == [1, 1, 1]
    assert core_decomposition(k5_k4()).tolist() == [4] * 5 + [3] * 4


def test_tr_core_examples():
    for g, want in [(clique(4), 3), (clique(5), 6)]:
        assert (tr_core_decomposition(g, enumerate_triangles(g)) == want).all()
    s = star(4)
    assert (tr_core_decomposition(s, enumerate_triangles(s)) == 0).all()


def random_graphs(max_n):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n)
        .map(lambda pairs: Graph.from_edges(n, pairs)))


@settings(max_examples=60, deadline=None)
@given(random_graphs(50))
def test_triangles_match_triple_scan(g):
    adj = g.adj_sets
    brute = [(a, b, c) for a, b, c in combinations(range(g.n), 3)
             if b in adj[a] and c in adj[a] and c in adj[b]]
    t = enumerate_triangles(g)
    assert [tuple(x) for x in t.triangles.tolist()] == brute
    for u in range(g.n):
        assert sorted(t.incidence(u).tolist()) == [i for i, tri in enumerate(brute) if u in tri]


@settings(max_examples=60, deadline=None)
@given(random_graphs(30))
def test_core_levels_have_min_degree(g):
    core = core_decomposition(g)
    for k in range(int(core.max(initial=0)) + 1):
        members = np.flatnonzero(core >= k)
        if len(members):
            assert induced_subgraph(g, members).degrees.min() >= k


@settings(max_examples=60, deadline=None)
@given(random_graphs(20), st.data())
def test_induced_density_matches_filtering(g, data):
    s = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1))
    brute = sum(1 for u, v in g.edges.tolist() if u in s and v in s)
    assert density(induced_subgraph(g, s)) == Fraction(brute, len(s))
    assert count_induced_edges(g, s) == brute


def _tr_core_by_heap_peel(g, tie):
    # reference peel with an explicit tie rule, recounting triangles each step
    alive = set(range(g.n))
    adj = g.adj_sets
    core = [0] * g.n
    level = 0
    while alive:
        counts = {u: sum(1 for a, b in combinations(sorted(adj[u] & alive), 2) if b in adj[a])
                  for u in alive}
        u = min(alive, key=lambda x: (counts[x], tie(x)))
        level = max(level, counts[u])
        core[u] = level
        alive.discard(u)
    return core


def test_tr_core_independent_of_tie_breaking():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(3, 12)
        g = Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5])
        got = tr_core_decomposition(g, enumerate_triangles(g)).tolist()
        assert got == _tr_core_by_heap_peel(g, lambda x: x)
        assert got == _tr_core_by_heap_peel(g, lambda x: -x)
