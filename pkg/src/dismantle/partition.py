"""One-shot balanced k-way partition of a rooted spanning tree.

The tree is walked in post-order.  Each vertex carries the size of the part
of its subtree not yet cut away; the first time that size reaches the
current target share the edge to the parent is cut and the pointer into the
share list advances.  If the pass ends with fewer than ``k - 1`` cuts, extra
tree edges are cut one at a time, each time choosing the edge whose dangling
piece is closest to the next outstanding share (ties: smaller EdgeId).  That
adjustment rescans the tree per cut, O(k n) worst case; it only fires on
skewed trees.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class TargetShares:
    q: int
    r: int
    targets: tuple
    tptr: int = field(default=0)


def target_shares(n, k):
    """Ideal class sizes: ``q + 1`` repeated ``r`` times, then ``q``."""
    if k < 1 or k > n:
        raise ValueError(f"k must lie in [1, n={n}], got {k}")
    q, r = divmod(n, k)
    return TargetShares(q, r, (q + 1,) * r + (q,) * (k - r))


@dataclass(frozen=True)
class TreeOrder:
    parent: np.ndarray
    parent_edge: np.ndarray
    child_ptr: np.ndarray
    children_flat: np.ndarray
    post_order: np.ndarray
    subtree_sizes: np.ndarray

    def children(self, u):
        return self.children_flat[self.child_ptr[u]:self.child_ptr[u + 1]]


def dfs_preprocess(tree):
    """Parents, children (ascending), post-order and subtree sizes.

    Uses an explicit stack, so path-shaped trees of any depth are fine.
    """
    parent = np.ascontiguousarray(tree.parent, dtype=np.int64)
    ptr, kids, post, size = kernels.tree_order(parent, tree.root)
    return TreeOrder(parent, tree.parent_edge, ptr, kids, post, size)


@dataclass(frozen=True, eq=False)
class Partition:
    """``k`` tree-connected vertex classes.

    ``class_of[v]`` is in ``[0, k)``; class ``i < k - 1`` is the piece hanging
    below ``tree_cuts[i]`` (cut order), class ``k - 1`` holds the root.
    """

    k: int
    class_of: np.ndarray
    class_sizes: np.ndarray
    tree_cuts: np.ndarray


def balanced_partition(tree, k):
    n = len(tree.parent)
    if k < 1 or k > n:
        raise ValueError(f"k must lie in [1, n={n}], got {k}")
    class_of, cut_vertices = kernels.partition_tree(
        np.ascontiguousarray(tree.parent, dtype=np.int64),
        np.ascontiguousarray(tree.parent_edge, dtype=np.int64),
        tree.root, k,
    )
    return Partition(
        k=k,
        class_of=class_of,
        class_sizes=np.bincount(class_of, minlength=k),
        tree_cuts=np.asarray(tree.parent_edge)[cut_vertices],
    )
