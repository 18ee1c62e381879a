import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dismantle.graph import Graph, path_graph
from dismantle.partition import balanced_partition, dfs_preprocess, target_shares
from dismantle.ust import SpanningTree, is_spanning_tree, sample_ust
from oracles import random_connected, rng, union_find_lcc


def _tree(g, seed=1):
    return sample_ust(g, seed)


def star(leaves):
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def classes_connected(tree, part):
    """Each class, restricted to the tree edges inside it, is one component."""
    n = len(tree.parent)
    cut = {int(e) for e in part.tree_cuts}
    inside = []
    for v in range(n):
        p = int(tree.parent[v])
        if p >= 0 and int(tree.parent_edge[v]) not in cut:
            assert part.class_of[v] == part.class_of[p]
            inside.append((min(v, p), max(v, p)))
    _, sizes = union_find_lcc(n, inside)
    return sorted(sizes) == sorted(part.class_sizes.tolist())


def test_dfs_path():
    order = dfs_preprocess(_tree(path_graph(3)))
    assert order.post_order.tolist()[-1] == 0
    assert order.subtree_sizes.tolist() == [3, 2, 1]


def test_dfs_star():
    order = dfs_preprocess(_tree(star(5)))
    assert order.subtree_sizes.tolist() == [6, 1, 1, 1, 1, 1]
    assert sorted(order.children(0).tolist()) == [1, 2, 3, 4, 5]


def test_dfs_single_vertex():
    order = dfs_preprocess(_tree(Graph(1, [])))
    assert order.post_order.tolist() == [0]
    assert order.subtree_sizes.tolist() == [1]


def path_tree(n):
    # parent[v] = v - 1 matches path_graph's edge ids, no walk needed
    idx = np.arange(-1, n - 1, dtype=np.int64)
    return SpanningTree(0, idx, idx.copy(), path_graph(n))


def test_dfs_deep_path_no_recursion_limit():
    order = dfs_preprocess(path_tree(200000))
    assert order.subtree_sizes[0] == 200000
    assert order.post_order[0] == 199999


@pytest.mark.parametrize("n,k,targets", [(10, 3, [4, 3, 3]), (6, 2, [3, 3]), (7, 7, [1] * 7)])
def test_target_shares(n, k, targets):
    ts = target_shares(n, k)
    assert list(ts.targets) == targets
    assert ts.q == n // k and ts.r == n - ts.q * k and ts.tptr == 0


@pytest.mark.parametrize("n,k", [(5, 0), (5, 6)])
def test_target_shares_invalid(n, k):
    with pytest.raises(ValueError):
        target_shares(n, k)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 500), st.data())
def test_target_shares_properties(n, data):
    k = data.draw(st.integers(1, n))
    t = target_shares(n, k).targets
    assert sum(t) == n and len(t) == k and max(t) - min(t) <= 1


def test_path_six_k2():
    g = path_graph(6)
    part = balanced_partition(_tree(g), 2)
    assert part.class_sizes.tolist() == [3, 3]
    assert part.tree_cuts.tolist() == [g.edge_id(2, 3)]
    assert set(np.flatnonzero(part.class_of == part.class_of[5]).tolist()) == {3, 4, 5}


def test_path_six_k3():
    part = balanced_partition(_tree(path_graph(6)), 3)
    assert part.class_sizes.tolist() == [2, 2, 2]


def test_star_adjustment_matches_brute_force():
    g = star(5)
    part = balanced_partition(_tree(g), 2)
    assert sorted(part.class_sizes.tolist()) == [1, 5]
    # every single-edge cut of the star leaves a 5-vertex side
    brute = min(max(union_find_lcc(6, [tuple(e) for e in g.edge_pairs()], [i])[1])
                for i in range(g.m))
    assert max(part.class_sizes) == brute


def test_k1_whole_tree():
    part = balanced_partition(_tree(path_graph(4)), 1)
    assert part.tree_cuts.tolist() == [] and part.class_sizes.tolist() == [4]


def test_invalid_k():
    with pytest.raises(ValueError):
        balanced_partition(_tree(path_graph(4)), 5)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 200), st.data())
def test_path_tree_max_class(n, data):
    k = data.draw(st.integers(1, n))
    part = balanced_partition(path_tree(n), k)
    assert int(part.class_sizes.max()) == math.ceil(n / k)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 200), st.integers(0, 10**9), st.data())
def test_partition_invariants(n, seed, data):
    r = rng(seed)
    m = r.randint(n - 1, min(n * (n - 1) // 2, 3 * n))
    g = Graph(n, random_connected(r, n, m))
    tree = _tree(g, seed)
    k = data.draw(st.integers(1, n))
    part = balanced_partition(tree, k)
    assert len(part.class_sizes) == k and int(part.class_sizes.sum()) == n
    assert np.all(part.class_sizes > 0)
    assert len(part.tree_cuts) == k - 1 == len(set(part.tree_cuts.tolist()))
    assert classes_connected(tree, part)


def test_greedy_is_not_min_max_optimal():
    # documents a limit of the one-shot greedy: a 7-vertex tree where 3 cuts
    # could leave pieces of at most 2, but the greedy leaves a piece of 3
    edges = [(0, 4), (1, 2), (1, 3), (2, 4), (2, 6), (3, 5)]
    g = Graph(7, edges)
    part = balanced_partition(_tree(g), 4)
    best = min(max(union_find_lcc(7, edges, c)[1]) for c in itertools.combinations(range(6), 3))
    assert best == 2
    assert int(part.class_sizes.max()) == 3


def test_path_tree_helper_is_valid():
    assert is_spanning_tree(path_tree(50))
    assert np.array_equal(path_tree(50).parent, _tree(path_graph(50)).parent)


@pytest.mark.slow
def test_partition_time_linear_on_paths():
    from dismantle.bench import loglog_slope, median_time

    sizes = [10**3, 10**4, 10**5, 10**6]
    times = []
    for n in sizes:
        tree = path_tree(n)
        reps = max(1, 10**5 // n)
        times.append(median_time(lambda: [balanced_partition(tree, 7) for _ in range(reps)], 5) / reps)
    assert 0.8 <= loglog_slope(sizes, times) <= 1.3
