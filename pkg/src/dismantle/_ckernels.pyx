# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Wilson sampling, tree partition, components, pruning.

Bit-compatible with ``_pykernels``.  All loops run without the GIL so the
solver's thread pool gets real parallelism.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, uint32_t, uint8_t
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

ctypedef struct Rng:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void _seed(Rng* r, uint64_t seed) noexcept nogil:
    cdef uint64_t sm = seed
    sm += <uint64_t>0x9E3779B97F4A7C15ULL
    r.s0 = _mix64(sm)
    sm += <uint64_t>0x9E3779B97F4A7C15ULL
    r.s1 = _mix64(sm)
    sm += <uint64_t>0x9E3779B97F4A7C15ULL
    r.s2 = _mix64(sm)
    sm += <uint64_t>0x9E3779B97F4A7C15ULL
    r.s3 = _mix64(sm)


cdef inline uint64_t _next(Rng* r) noexcept nogil:
    cdef uint64_t x = r.s1 * 5
    cdef uint64_t result = ((x << 7) | (x >> 57)) * 9
    cdef uint64_t t = r.s1 << 17
    r.s2 ^= r.s0
    r.s3 ^= r.s1
    r.s1 ^= r.s2
    r.s0 ^= r.s3
    r.s2 ^= t
    r.s3 = (r.s3 << 45) | (r.s3 >> 19)
    return result


cdef inline uint64_t _bounded(Rng* r, uint32_t n) noexcept nogil:
    cdef uint64_t m = (_next(r) >> 32) * n
    cdef uint32_t low = <uint32_t>m
    cdef uint32_t threshold
    if low < n:
        threshold = (<uint32_t>(-n)) % n
        while low < threshold:
            m = (_next(r) >> 32) * n
            low = <uint32_t>m
    return m >> 32


# ---------------------------------------------------------------- Wilson

cdef int _wilson(Py_ssize_t n, const int64_t* indptr, const int64_t* nbr,
                 const int64_t* eid, int64_t root, uint64_t seed,
                 int64_t* parent, int64_t* pedge,
                 int64_t* nxt, int64_t* nxte, uint8_t* in_tree) noexcept nogil:
    cdef Rng rng
    cdef Py_ssize_t start, i
    cdef int64_t u, lo, deg, j
    _seed(&rng, seed)
    for i in range(n):
        in_tree[i] = 0
        parent[i] = -1
        pedge[i] = -1
    in_tree[root] = 1
    for start in range(n):
        u = start
        while not in_tree[u]:
            lo = indptr[u]
            deg = indptr[u + 1] - lo
            if deg == 0:
                return -1
            j = lo + <int64_t>_bounded(&rng, <uint32_t>deg)
            nxt[u] = nbr[j]
            nxte[u] = eid[j]
            u = nbr[j]
        u = start
        while not in_tree[u]:
            in_tree[u] = 1
            parent[u] = nxt[u]
            pedge[u] = nxte[u]
            u = nxt[u]
    return 0


def wilson(const int64_t[::1] indptr, const int64_t[::1] nbr,
           const int64_t[::1] nbr_eid, int64_t root, uint64_t seed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    parent = np.empty(n, dtype=np.int64)
    pedge = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    nxte = np.empty(n, dtype=np.int64)
    in_tree = np.empty(n, dtype=np.uint8)
    cdef int64_t[::1] p = parent, pe = pedge, nx = nxt, nxe = nxte
    cdef uint8_t[::1] it = in_tree
    cdef int rc
    if n == 0:
        return parent, pedge
    with nogil:
        rc = _wilson(n, &indptr[0], &nbr[0] if nbr.shape[0] else NULL,
                     &nbr_eid[0] if nbr_eid.shape[0] else NULL, root, seed,
                     &p[0], &pe[0], &nx[0], &nxe[0], &it[0])
    if rc != 0:
        raise ValueError("graph must be connected")
    return parent, pedge


# ------------------------------------------------------- tree partition

cdef int _tree_post(Py_ssize_t n, const int64_t* parent, int64_t root,
                    int64_t* ptr, int64_t* kids, int64_t* cursor,
                    int64_t* stack, int64_t* post) noexcept nogil:
    cdef Py_ssize_t v, top, npost
    cdef int64_t u, p
    for v in range(n + 1):
        ptr[v] = 0
    for v in range(n):
        if v != root:
            ptr[parent[v] + 1] += 1
    for v in range(n):
        ptr[v + 1] += ptr[v]
    for v in range(n):
        cursor[v] = ptr[v]
    for v in range(n):
        if v != root:
            p = parent[v]
            kids[cursor[p]] = v
            cursor[p] += 1
    for v in range(n):
        cursor[v] = ptr[v]
    top = 0
    npost = 0
    stack[0] = root
    while top >= 0:
        u = stack[top]
        if cursor[u] < ptr[u + 1]:
            top += 1
            stack[top] = kids[cursor[u]]
            cursor[u] += 1
        else:
            post[npost] = u
            npost += 1
            top -= 1
    return 0 if npost == n else -1


cdef void _partition(Py_ssize_t n, const int64_t* parent, const int64_t* pedge,
                     int64_t root, int64_t k, const int64_t* post,
                     int64_t* acc, int64_t* cut, int64_t* cut_order,
                     int64_t* class_of) noexcept nogil:
    cdef int64_t q = n // k
    cdef int64_t r = n - q * k
    cdef int64_t need = k - 1
    cdef int64_t ncut = 0
    cdef int64_t t, u, best, best_d, best_e, d
    cdef Py_ssize_t i
    for i in range(n):
        acc[i] = 1
        cut[i] = -1
    for i in range(n):
        u = post[i]
        if u == root:
            continue
        if ncut < need:
            t = q + 1 if ncut < r else q
            if acc[u] >= t:
                cut[u] = ncut
                cut_order[ncut] = u
                ncut += 1
                continue
        acc[parent[u]] += acc[u]

    while ncut < need:
        for i in range(n):
            acc[i] = 1
        for i in range(n):
            u = post[i]
            if u != root and cut[u] < 0:
                acc[parent[u]] += acc[u]
        t = q + 1 if ncut < r else q
        best = -1
        best_d = 0
        best_e = 0
        for i in range(n):
            u = post[i]
            if u == root or cut[u] >= 0:
                continue
            d = acc[u] - t
            if d < 0:
                d = -d
            if best < 0 or d < best_d or (d == best_d and pedge[u] < best_e):
                best = u
                best_d = d
                best_e = pedge[u]
        cut[best] = ncut
        cut_order[ncut] = best
        ncut += 1

    class_of[root] = k - 1
    i = n - 1
    while i >= 0:
        u = post[i]
        if u != root:
            class_of[u] = cut[u] if cut[u] >= 0 else class_of[parent[u]]
        i -= 1


def tree_order(const int64_t[::1] parent, int64_t root):
    cdef Py_ssize_t n = parent.shape[0]
    ptr = np.zeros(n + 1, dtype=np.int64)
    kids = np.zeros(max(n - 1, 0), dtype=np.int64)
    post = np.zeros(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    if n == 0:
        return ptr, kids, post, size
    cursor = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] p_ = ptr, c_ = cursor, s_ = stack, po = post, sz = size
    cdef int64_t[::1] k_ = kids if n > 1 else np.zeros(1, dtype=np.int64)
    cdef int rc
    cdef Py_ssize_t i
    cdef int64_t u
    with nogil:
        rc = _tree_post(n, &parent[0], root, &p_[0], &k_[0], &c_[0], &s_[0], &po[0])
        if rc == 0:
            for i in range(n):
                u = po[i]
                if u != root:
                    sz[parent[u]] += sz[u]
    if rc != 0:
        raise ValueError("parent array does not describe a tree rooted at root")
    return ptr, kids, post, size


def partition_tree(const int64_t[::1] parent, const int64_t[::1] parent_edge,
                   int64_t root, int64_t k):
    cdef Py_ssize_t n = parent.shape[0]
    class_of = np.empty(n, dtype=np.int64)
    cut_order = np.empty(max(k - 1, 1), dtype=np.int64)
    ptr = np.empty(n + 1, dtype=np.int64)
    kids = np.empty(max(n, 1), dtype=np.int64)
    cursor = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    post = np.empty(n, dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    cut = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] co = class_of, cord = cut_order, p_ = ptr, k_ = kids
    cdef int64_t[::1] c_ = cursor, s_ = stack, po = post, a_ = acc, cu = cut
    cdef int rc
    with nogil:
        rc = _tree_post(n, &parent[0], root, &p_[0], &k_[0], &c_[0], &s_[0], &po[0])
        if rc == 0:
            _partition(n, &parent[0], &parent_edge[0], root, k, &po[0],
                       &a_[0], &cu[0], &cord[0], &co[0])
    if rc != 0:
        raise ValueError("parent array does not describe a tree rooted at root")
    return class_of, cut_order[:k - 1].copy()


def trial_batch(const int64_t[::1] indptr, const int64_t[::1] nbr,
                const int64_t[::1] nbr_eid, const int64_t[::1] eu,
                const int64_t[::1] ev, int64_t root, int64_t k, seeds):
    """lcc and crossing-edge count for one sample-cut-evaluate trial per seed."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t ns = len(seeds)
    seed_arr = np.asarray(seeds, dtype=np.uint64)
    lcc = np.empty(ns, dtype=np.int64)
    ncut = np.empty(ns, dtype=np.int64)
    cdef uint64_t[::1] sd = seed_arr
    cdef int64_t[::1] lc = lcc, nc = ncut
    cdef int64_t* buf = <int64_t*>malloc(sizeof(int64_t) * (12 * n + 8 + k))
    cdef uint8_t* in_tree = <uint8_t*>malloc(n + 1)
    if buf == NULL or in_tree == NULL:
        free(buf)
        free(in_tree)
        raise MemoryError()
    cdef int64_t* parent = buf
    cdef int64_t* pedge = buf + n
    cdef int64_t* nxt = buf + 2 * n
    cdef int64_t* nxte = buf + 3 * n
    cdef int64_t* ptr = buf + 4 * n          # n + 1 slots
    cdef int64_t* kids = buf + 5 * n + 1
    cdef int64_t* cursor = buf + 6 * n + 2
    cdef int64_t* stack = buf + 7 * n + 2
    cdef int64_t* post = buf + 8 * n + 2
    cdef int64_t* acc = buf + 9 * n + 2
    cdef int64_t* cut = buf + 10 * n + 2
    cdef int64_t* class_of = buf + 11 * n + 2
    cdef int64_t* cut_order = buf + 12 * n + 2
    cdef int64_t* sizes
    cdef Py_ssize_t s, i
    cdef int64_t best, crossing
    cdef int rc = 0
    sizes_arr = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] sz = sizes_arr
    sizes = &sz[0]
    try:
        with nogil:
            for s in range(ns):
                rc = _wilson(n, &indptr[0], &nbr[0], &nbr_eid[0], root, sd[s],
                             parent, pedge, nxt, nxte, in_tree)
                if rc != 0:
                    break
                rc = _tree_post(n, parent, root, ptr, kids, cursor, stack, post)
                if rc != 0:
                    break
                _partition(n, parent, pedge, root, k, post, acc, cut,
                           cut_order, class_of)
                for i in range(k):
                    sizes[i] = 0
                for i in range(n):
                    sizes[class_of[i]] += 1
                best = 0
                for i in range(k):
                    if sizes[i] > best:
                        best = sizes[i]
                crossing = 0
                for i in range(m):
                    if class_of[eu[i]] != class_of[ev[i]]:
                        crossing += 1
                lc[s] = best
                nc[s] = crossing
    finally:
        free(buf)
        free(in_tree)
    if rc != 0:
        raise ValueError("graph must be connected")
    return lcc, ncut


# ------------------------------------------------------------ components

def components(const int64_t[::1] indptr, const int64_t[::1] nbr,
               const int64_t[::1] nbr_eid, const uint8_t[::1] removed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    labels = np.full(n, -1, dtype=np.int64)
    stack_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef int64_t[::1] lab = labels, st = stack_arr
    cdef Py_ssize_t s, top, j
    cdef int64_t label = 0, u, v
    with nogil:
        for s in range(n):
            if lab[s] >= 0:
                continue
            lab[s] = label
            top = 0
            st[0] = s
            while top >= 0:
                u = st[top]
                top -= 1
                for j in range(indptr[u], indptr[u + 1]):
                    v = nbr[j]
                    if lab[v] < 0 and not removed[nbr_eid[j]]:
                        lab[v] = label
                        top += 1
                        st[top] = v
            label += 1
    return labels


# --------------------------------------------------------------- pruning

def prune_edges(const int64_t[::1] indptr, const int64_t[::1] nbr,
                const int64_t[::1] nbr_eid, const int64_t[::1] eu,
                const int64_t[::1] ev, int64_t target, uint64_t seed):
    """Delete uniformly random non-bridge edges until ``target`` remain."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = eu.shape[0]
    alive_arr = np.ones(m, dtype=np.uint8)
    cand_arr = np.arange(m, dtype=np.int64)
    stamp_arr = np.zeros(max(n, 1), dtype=np.int64)
    queue_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef uint8_t[::1] alive = alive_arr
    cdef int64_t[::1] cand = cand_arr, stamp = stamp_arr, queue = queue_arr
    cdef Rng rng
    cdef Py_ssize_t ncand = m, head, tail, p
    cdef int64_t current = m, epoch = 0, e, src, dst, u, w, j
    cdef bint found
    cdef int rc = 0
    _seed(&rng, seed)
    with nogil:
        while current > target:
            if ncand == 0:
                rc = -1
                break
            j = <int64_t>_bounded(&rng, <uint32_t>ncand)
            e = cand[j]
            cand[j] = cand[ncand - 1]
            ncand -= 1
            alive[e] = 0
            epoch += 1
            src = eu[e]
            dst = ev[e]
            stamp[src] = epoch
            head = 0
            tail = 0
            queue[tail] = src
            tail += 1
            found = False
            while head < tail and not found:
                u = queue[head]
                head += 1
                for p in range(indptr[u], indptr[u + 1]):
                    if not alive[nbr_eid[p]]:
                        continue
                    w = nbr[p]
                    if stamp[w] != epoch:
                        if w == dst:
                            found = True
                            break
                        stamp[w] = epoch
                        queue[tail] = w
                        tail += 1
            if found:
                current -= 1
            else:
                alive[e] = 1
    if rc != 0:
        raise ValueError("no removable edge left before reaching target")
    return alive_arr


# -------------------------------------------------------- rng test hooks

def rng_stream(uint64_t seed, Py_ssize_t count):
    cdef Rng rng
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t i
    _seed(&rng, seed)
    for i in range(count):
        o[i] = _next(&rng)
    return out


def rng_bounded_stream(uint64_t seed, uint32_t n, Py_ssize_t count):
    cdef Rng rng
    out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t i
    _seed(&rng, seed)
    for i in range(count):
        o[i] = <int64_t>_bounded(&rng, n)
    return out
