"""Pure-Python implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function and bit for bit; used when
the extension is not built or ``DISMANTLE_PURE_PYTHON=1`` is set.  Arrays
come in as int64 numpy arrays and are converted to lists up front, since
element access on lists is several times faster than on ndarrays.
"""

from collections import deque

import numpy as np

from ._rng import Xoshiro256

BACKEND = "python"


def wilson(indptr, nbr, nbr_eid, root, seed):
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    nbr_eid = nbr_eid.tolist()
    n = len(indptr) - 1
    rng = Xoshiro256(seed)
    bounded = rng.bounded
    in_tree = [False] * n
    nxt = [-1] * n
    nxt_e = [-1] * n
    parent = [-1] * n
    parent_edge = [-1] * n
    in_tree[root] = True
    for start in range(n):
        u = start
        while not in_tree[u]:
            lo = indptr[u]
            deg = indptr[u + 1] - lo
            if deg == 0:
                raise ValueError("graph must be connected")
            j = lo + bounded(deg)
            nxt[u] = nbr[j]
            nxt_e[u] = nbr_eid[j]
            u = nbr[j]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            parent[u] = nxt[u]
            parent_edge[u] = nxt_e[u]
            u = nxt[u]
    return np.array(parent, dtype=np.int64), np.array(parent_edge, dtype=np.int64)


def _children(parent, root):
    n = len(parent)
    ptr = [0] * (n + 1)
    for v in range(n):
        if v != root:
            ptr[parent[v] + 1] += 1
    for v in range(n):
        ptr[v + 1] += ptr[v]
    fill = ptr[:-1]
    fill = list(fill)
    kids = [0] * max(n - 1, 0)
    for v in range(n):
        if v != root:
            p = parent[v]
            kids[fill[p]] = v
            fill[p] += 1
    return ptr, kids


def _post_order(ptr, kids, root, n):
    post = []
    stack = [root]
    cursor = list(ptr[:-1])
    while stack:
        u = stack[-1]
        if cursor[u] < ptr[u + 1]:
            c = kids[cursor[u]]
            cursor[u] += 1
            stack.append(c)
        else:
            post.append(stack.pop())
    if len(post) != n:
        raise ValueError("parent array does not describe a tree rooted at root")
    return post


def tree_order(parent, root):
    parent = parent.tolist()
    n = len(parent)
    ptr, kids = _children(parent, root)
    post = _post_order(ptr, kids, root, n)
    size = [1] * n
    for u in post:
        if u != root:
            size[parent[u]] += size[u]
    as_arr = lambda xs: np.array(xs, dtype=np.int64)  # noqa: E731
    return as_arr(ptr), as_arr(kids), as_arr(post), as_arr(size)


def _partition(parent, parent_edge, root, k, post):
    n = len(parent)
    q, r = divmod(n, k)
    need = k - 1
    acc = [1] * n
    cut = [-1] * n
    cut_order = []
    for u in post:
        if u == root:
            continue
        if len(cut_order) < need:
            t = q + 1 if len(cut_order) < r else q
            if acc[u] >= t:
                cut[u] = len(cut_order)
                cut_order.append(u)
                continue
        acc[parent[u]] += acc[u]

    while len(cut_order) < need:
        # linear rescan per extra cut; only reached on skewed trees
        acc = [1] * n
        for u in post:
            if u != root and cut[u] < 0:
                acc[parent[u]] += acc[u]
        c = len(cut_order)
        t = q + 1 if c < r else q
        best = -1
        best_key = None
        for u in post:
            if u == root or cut[u] >= 0:
                continue
            key = (abs(acc[u] - t), parent_edge[u])
            if best_key is None or key < best_key:
                best, best_key = u, key
        cut[best] = c
        cut_order.append(best)

    class_of = [0] * n
    class_of[root] = k - 1
    for u in reversed(post):
        if u != root:
            class_of[u] = cut[u] if cut[u] >= 0 else class_of[parent[u]]
    return class_of, cut_order


def partition_tree(parent, parent_edge, root, k):
    parent = parent.tolist()
    parent_edge = parent_edge.tolist()
    n = len(parent)
    ptr, kids = _children(parent, root)
    post = _post_order(ptr, kids, root, n)
    class_of, cut_order = _partition(parent, parent_edge, root, k, post)
    return np.array(class_of, dtype=np.int64), np.array(cut_order, dtype=np.int64)


def trial_batch(indptr, nbr, nbr_eid, eu, ev, root, k, seeds):
    eu_l = eu.tolist()
    ev_l = ev.tolist()
    lcc = np.empty(len(seeds), dtype=np.int64)
    ncut = np.empty(len(seeds), dtype=np.int64)
    for i, seed in enumerate(seeds):
        parent, parent_edge = wilson(indptr, nbr, nbr_eid, root, seed)
        class_of, _ = partition_tree(parent, parent_edge, root, k)
        cls = class_of.tolist()
        sizes = [0] * k
        for c in cls:
            sizes[c] += 1
        lcc[i] = max(sizes)
        ncut[i] = sum(1 for a, b in zip(eu_l, ev_l) if cls[a] != cls[b])
    return lcc, ncut


def components(indptr, nbr, nbr_eid, removed):
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    nbr_eid = nbr_eid.tolist()
    removed = removed.tolist()
    n = len(indptr) - 1
    labels = [-1] * n
    label = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = label
        stack = [s]
        while stack:
            u = stack.pop()
            for j in range(indptr[u], indptr[u + 1]):
                v = nbr[j]
                if labels[v] < 0 and not removed[nbr_eid[j]]:
                    labels[v] = label
                    stack.append(v)
        label += 1
    return np.array(labels, dtype=np.int64)


def prune_edges(indptr, nbr, nbr_eid, eu, ev, target, seed):
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    nbr_eid = nbr_eid.tolist()
    eu = eu.tolist()
    ev = ev.tolist()
    n = len(indptr) - 1
    m = len(eu)
    alive = [1] * m
    cand = list(range(m))
    rng = Xoshiro256(seed)
    stamp = [0] * n
    current = m
    epoch = 0
    while current > target:
        if not cand:
            raise ValueError("no removable edge left before reaching target")
        j = rng.bounded(len(cand))
        e = cand[j]
        cand[j] = cand[-1]
        cand.pop()
        alive[e] = 0
        epoch += 1
        src, dst = eu[e], ev[e]
        stamp[src] = epoch
        queue = deque([src])
        found = False
        while queue and not found:
            u = queue.popleft()
            for p in range(indptr[u], indptr[u + 1]):
                if not alive[nbr_eid[p]]:
                    continue
                w = nbr[p]
                if stamp[w] != epoch:
                    if w == dst:
                        found = True
                        break
                    stamp[w] = epoch
                    queue.append(w)
        if found:
            current -= 1
        else:
            alive[e] = 1  # bridge now, bridge forever
    return np.array(alive, dtype=np.uint8)


def rng_stream(seed, count):
    rng = Xoshiro256(seed)
    return np.array([rng.next64() for _ in range(count)], dtype=np.uint64)


def rng_bounded_stream(seed, n, count):
    rng = Xoshiro256(seed)
    return np.array([rng.bounded(n) for _ in range(count)], dtype=np.int64)
