from collections import Counter

import numpy as np
import pytest

from dismantle._rng import seed_list
from dismantle.graph import Graph, complete_graph, cycle_graph, path_graph
from dismantle.planar import GenSpec, generate
from dismantle.ust import is_spanning_tree, sample_ust
from oracles import chi2_sf, spanning_trees


def _tree_key(tree):
    return frozenset(int(e) for e in tree.edge_ids())


def _frequencies(g, samples, master=0):
    return Counter(_tree_key(sample_ust(g, s)) for s in seed_list(master, samples))


def test_tree_input_returns_itself():
    g = Graph(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)])
    for s in seed_list(1, 10):
        t = sample_ust(g, s)
        assert _tree_key(t) == frozenset(range(5))
        assert t.parent.tolist() == [-1, 0, 1, 1, 3, 3]


@pytest.mark.parametrize("g,samples", [(cycle_graph(3), 30000), (cycle_graph(4), 40000)])
def test_small_frequencies(g, samples):
    trees = spanning_trees(g.n, [tuple(e) for e in g.edge_pairs()])
    freq = _frequencies(g, samples)
    assert set(freq) == set(trees)
    for tr in trees:
        assert abs(freq[tr] / samples - 1 / len(trees)) <= 0.01


def test_validity_and_parent_edges():
    g = generate(GenSpec(150, 380, 5))
    for s in seed_list(2, 20):
        t = sample_ust(g, s)
        assert is_spanning_tree(t)
        assert t.root == 0 and t.parent[0] == -1
        for v in range(1, g.n):
            e = t.parent_edge[v]
            assert {int(g.eu[e]), int(g.ev[e])} == {v, int(t.parent[v])}


def test_deterministic():
    g = generate(GenSpec(100, 250, 1))
    a, b = sample_ust(g, 77), sample_ust(g, 77)
    assert np.array_equal(a.parent, b.parent)
    assert np.array_equal(a.parent_edge, b.parent_edge)


def test_disconnected_rejected():
    with pytest.raises(ValueError, match="connected"):
        sample_ust(Graph(4, [(0, 1), (2, 3)]), 1)


def test_single_vertex():
    t = sample_ust(Graph(1, []), 1)
    assert t.parent.tolist() == [-1]


def test_chi_square_k4_minus_edge():
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    trees = spanning_trees(4, [tuple(e) for e in g.edge_pairs()])
    assert len(trees) == 8
    freq = _frequencies(g, 10000, master=5)
    exp = 10000 / len(trees)
    stat = sum((freq[t] - exp) ** 2 / exp for t in trees)
    assert chi2_sf(stat, len(trees) - 1) > 0.001


def test_path_has_single_tree():
    g = path_graph(5)
    assert len(_frequencies(g, 50)) == 1


def test_k4_counts_sixteen():
    g = complete_graph(4)
    assert len(spanning_trees(4, [tuple(e) for e in g.edge_pairs()])) == 16
    assert len(_frequencies(g, 4000)) == 16
