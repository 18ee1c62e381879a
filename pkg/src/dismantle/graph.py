"""Undirected sparse graphs, connectivity queries and the edge-list format."""

from dataclasses import dataclass

import numpy as np

from . import kernels


class GraphFormatError(ValueError):
    """Malformed graph file; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``edges`` is an ``(E, 2)`` int64 array with ``u < v`` per row; the row
    index is the edge's stable id.  Adjacency is kept in CSR form
    (``indptr``, ``nbr``, ``nbr_eid``), each vertex's neighbours listed in
    increasing edge-id order.  ``coords`` is an optional ``(n, 2)`` float
    array used for layout export only.
    """

    def __init__(self, n, edges, coords=None):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("vertex index out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loop")
        edges = np.sort(edges, axis=1)
        if len(edges):
            keys = edges[:, 0] * n + edges[:, 1]
            if len(np.unique(keys)) != len(keys):
                raise ValueError("duplicate edge")
        self.n = n
        self.edges = edges
        self.edges.flags.writeable = False
        if coords is not None:
            coords = np.asarray(coords, dtype=np.float64).reshape(n, 2)
            coords.flags.writeable = False
        self.coords = coords

        m = len(edges)
        ends = np.concatenate([edges[:, 0], edges[:, 1]])
        others = np.concatenate([edges[:, 1], edges[:, 0]])
        eids = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int64)
        order = np.lexsort((eids, ends))
        self.nbr = np.ascontiguousarray(others[order], dtype=np.int64)
        self.nbr_eid = np.ascontiguousarray(eids[order], dtype=np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ends, minlength=n), out=self.indptr[1:])
        self.eu = np.ascontiguousarray(edges[:, 0])
        self.ev = np.ascontiguousarray(edges[:, 1])
        for a in (self.nbr, self.nbr_eid, self.indptr, self.eu, self.ev):
            a.flags.writeable = False

    @property
    def m(self):
        return len(self.edges)

    def degree(self):
        return np.diff(self.indptr)

    def neighbors(self, u):
        return self.nbr[self.indptr[u]:self.indptr[u + 1]]

    def incident_edges(self, u):
        return self.nbr_eid[self.indptr[u]:self.indptr[u + 1]]

    def edge_id(self, u, v):
        """EdgeId of ``(u, v)``; KeyError if absent."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        hit = np.nonzero(self.nbr[lo:hi] == v)[0]
        if not len(hit):
            raise KeyError((u, v))
        return int(self.nbr_eid[lo + hit[0]])

    def edge_pairs(self, ids=None):
        sel = self.edges if ids is None else self.edges[np.asarray(ids, dtype=np.int64)]
        return [[int(u), int(v)] for u, v in sel]

    def boundary_edges(self, mask):
        """Ids of edges with exactly one endpoint in the boolean vertex ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        return np.flatnonzero(mask[self.eu] != mask[self.ev])

    def subgraph(self, vertices):
        """Induced subgraph on ``vertices`` relabelled in the given order.

        Returns ``(sub, vertices, edge_ids)`` where ``edge_ids[i]`` is the host
        id of the sub-graph's edge ``i``.
        """
        vertices = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        keep = np.flatnonzero((local[self.eu] >= 0) & (local[self.ev] >= 0))
        sub_edges = np.stack([local[self.eu[keep]], local[self.ev[keep]]], axis=1)
        coords = None if self.coords is None else self.coords[vertices]
        return Graph(len(vertices), sub_edges, coords), vertices, keep

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or not np.array_equal(self.edges, other.edges):
            return False
        if (self.coords is None) != (other.coords is None):
            return False
        return self.coords is None or np.array_equal(self.coords, other.coords)

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@dataclass(frozen=True)
class ComponentLabeling:
    labels: np.ndarray
    sizes: np.ndarray

    @property
    def lcc(self):
        return int(self.sizes.max()) if len(self.sizes) else 0

    @property
    def count(self):
        return len(self.sizes)


def removal_mask(g, removed):
    mask = np.zeros(g.m, dtype=np.uint8)
    if removed is not None:
        ids = np.asarray(removed, dtype=np.int64).ravel()
        if len(ids) and (ids.min() < 0 or ids.max() >= g.m):
            raise ValueError("removed edge id out of range")
        mask[ids] = 1
    return mask


def components(g, removed=None):
    """Connected components of ``g`` with the edge ids in ``removed`` deleted."""
    if g.n == 0:
        return ComponentLabeling(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    labels = kernels.components(g.indptr, g.nbr, g.nbr_eid, removal_mask(g, removed))
    return ComponentLabeling(labels, np.bincount(labels))


def lcc(g, removed=None):
    return components(g, removed).lcc


def is_connected(g):
    return g.n <= 1 or components(g).lcc == g.n


# -------------------------------------------------------------- file format

def save_graph(g):
    """Serialize to the text edge-list format (UTF-8 bytes, LF line endings)."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    if g.coords is not None:
        lines.append("#coords")
        lines.extend(f"{x!r} {y!r}" for x, y in g.coords.tolist())
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_graph(text):
    """Parse the edge-list format; accepts ``str`` or ``bytes``."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.split("\n"))]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("%")]
    if not rows:
        raise GraphFormatError("missing header", 1)
    lineno, header = rows[0]
    parts = header.split()
    try:
        n, m = (int(x) for x in parts)
    except ValueError:
        raise GraphFormatError(f"malformed header {header!r}", lineno) from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative counts in header", lineno)

    body = rows[1:]
    if len(body) < m:
        line = body[-1][0] + 1 if body else lineno + 1
        raise GraphFormatError(f"expected {m} edge lines, found {len(body)}", line)
    edges = []
    seen = set()
    for lineno, ln in body[:m]:
        try:
            u, v = (int(x) for x in ln.split())
        except ValueError:
            raise GraphFormatError(f"malformed edge {ln!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex index out of range in {ln!r}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key}", lineno)
        seen.add(key)
        edges.append(key)

    rest = body[m:]
    coords = None
    if rest:
        lineno, ln = rest[0]
        if ln != "#coords":
            raise GraphFormatError(f"unexpected content {ln!r}", lineno)
        if len(rest) - 1 != n:
            raise GraphFormatError(f"expected {n} coordinate lines, found {len(rest) - 1}", lineno)
        coords = []
        for lineno, ln in rest[1:]:
            try:
                x, y = (float(t) for t in ln.split())
            except ValueError:
                raise GraphFormatError(f"malformed coordinate {ln!r}", lineno) from None
            coords.append((x, y))
    return Graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2), coords)


def read_graph(path):
    with open(path, "rb") as fh:
        return load_graph(fh.read())
