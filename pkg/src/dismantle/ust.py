"""Uniform spanning trees by Wilson's loop-erased random walk."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._rng import seed_list  # noqa: F401  re-exported for callers
from .graph import is_connected


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """Rooted spanning tree of ``host``.

    ``parent[root] == parent_edge[root] == -1``; for every other vertex
    ``parent_edge[v]`` is the host EdgeId joining ``v`` and ``parent[v]``.
    """

    root: int
    parent: np.ndarray
    parent_edge: np.ndarray
    host: object

    def edge_ids(self):
        return np.sort(self.parent_edge[self.parent_edge >= 0])


def sample_ust(g, seed, root=0):
    """Draw a spanning tree of ``g`` uniformly at random.

    Wilson's algorithm rooted at vertex 0: vertices not yet in the tree are
    taken in ascending order, each starts a simple random walk that stops on
    hitting the tree, and the loop-erased walk is grafted on.  Loop erasure
    uses the usual last-exit pointer per vertex, overwritten on revisits.
    The walk draws from a xoshiro256** stream seeded by ``seed`` alone, so
    the result is a pure function of ``(g, seed)``.
    """
    if g.n == 0:
        raise ValueError("graph has no vertices")
    if not is_connected(g):
        # the walk from an unreachable vertex would never hit the tree
        raise ValueError("graph must be connected")
    parent, parent_edge = kernels.wilson(g.indptr, g.nbr, g.nbr_eid, root, seed)
    return SpanningTree(root, parent, parent_edge, g)


def is_spanning_tree(tree):
    """Check spanning, acyclic, and that each parent edge really joins its pair."""
    g = tree.host
    n = g.n
    if tree.parent[tree.root] != -1:
        return False
    others = [v for v in range(n) if v != tree.root]
    if any(tree.parent[v] < 0 for v in others):
        return False
    for v in others:
        e = tree.parent_edge[v]
        if not 0 <= e < g.m or sorted((v, int(tree.parent[v]))) != g.edges[e].tolist():
            return False
    try:
        kernels.tree_order(np.ascontiguousarray(tree.parent, dtype=np.int64), tree.root)
    except ValueError:
        return False
    return len(set(tree.parent_edge[others].tolist())) == n - 1
