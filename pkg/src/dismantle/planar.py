"""Seeded random connected planar graphs.

Construction
------------
1. Vertices sit on a ``rows x cols`` grid, ``cols = ceil(sqrt(n))`` and
   ``rows = ceil(n / cols)``, filled row-major (the last row may be short).
   Coordinates are the cell centre in the unit square plus uniform jitter of
   +-0.3 cell.
2. Lattice edges join horizontal and vertical neighbours; every grid cell
   with four vertices gets one diagonal with random orientation.
3. Outer ears: along the top row and the left/right columns of the full
   rows, vertices two apart are joined (``(0,0)-(0,2)``, ``(0,2)-(0,4)``,
   ...).  These chords run through the outer face, on disjoint stretches of
   the boundary, so they cross nothing.  They lift the edge ceiling above
   ``3n - 2(rows + cols)`` which matters for small ``n``.
4. Uniformly random non-bridge edges are deleted until ``edges`` remain.

Randomness comes from xoshiro256** (see ``_rng``).  The generation seed is
expanded with ``derive_seed``: stream 0 drives coordinates and diagonals,
stream 1 drives the deletions.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._rng import Xoshiro256, derive_seed
from .graph import Graph


@dataclass(frozen=True)
class GenSpec:
    nodes: int
    edges: int
    seed: int = 0


def grid_shape(n):
    cols = math.isqrt(n)
    if cols * cols < n:
        cols += 1
    rows = -(-n // cols)
    return rows, cols


def _mesh(n, seed):
    rows, cols = grid_shape(n)
    rng = Xoshiro256(derive_seed(seed, 0))

    def vid(r, c):
        i = r * cols + c
        return i if c < cols and i < n else -1

    coords = np.empty((n, 2), dtype=np.float64)
    for i in range(n):
        r, c = divmod(i, cols)
        jx = (rng.random() * 2.0 - 1.0) * 0.3
        jy = (rng.random() * 2.0 - 1.0) * 0.3
        coords[i, 0] = (c + 0.5 + jx) / cols
        coords[i, 1] = (r + 0.5 + jy) / rows

    edges = []
    for r in range(rows):
        for c in range(cols):
            a = vid(r, c)
            if a < 0:
                continue
            right, down = vid(r, c + 1), vid(r + 1, c)
            if right >= 0:
                edges.append((a, right))
            if down >= 0:
                edges.append((a, down))
            diag = vid(r + 1, c + 1)
            if right >= 0 and down >= 0 and diag >= 0:
                if rng.next64() >> 63:
                    edges.append((a, diag))
                else:
                    edges.append((right, down))

    full_rows = n // cols
    for c in range(0, cols - 2, 2):
        if vid(0, c + 2) >= 0:
            edges.append((vid(0, c), vid(0, c + 2)))
    if cols > 1:
        for r in range(0, full_rows - 2, 2):
            edges.append((vid(r, 0), vid(r + 2, 0)))
            edges.append((vid(r, cols - 1), vid(r + 2, cols - 1)))
    return np.array(edges, dtype=np.int64).reshape(-1, 2), coords


def max_edges(n):
    """Largest edge count the construction can deliver for ``n`` vertices."""
    if n < 2:
        return 0
    edges, _ = _mesh(n, 0)
    return len(edges)


def generate(spec):
    """Connected planar graph with exactly ``spec.nodes`` / ``spec.edges``."""
    n, target = spec.nodes, spec.edges
    if n < 2:
        raise ValueError("nodes must be >= 2")
    if target < n - 1:
        raise ValueError(f"edges must be >= nodes - 1 = {n - 1} for a connected graph")
    if n >= 3 and target > 3 * n - 6:
        raise ValueError(f"edges exceeds the planar bound 3n-6 = {3 * n - 6}")
    full, coords = _mesh(n, spec.seed)
    if target > len(full):
        raise ValueError(
            f"edge target {target} unreachable: construction yields "
            f"{n - 1}..{len(full)} edges for {n} nodes"
        )
    mesh = Graph(n, full, coords)
    alive = kernels.prune_edges(mesh.indptr, mesh.nbr, mesh.nbr_eid, mesh.eu, mesh.ev,
                                target, derive_seed(spec.seed, 1))
    return Graph(n, full[alive.astype(bool)], coords)


def density_feature(g_or_n, m=None):
    """``t = log|E| / log|V|``; accepts a graph or the two counts."""
    if m is None:
        n, m = g_or_n.n, g_or_n.m
    else:
        n = g_or_n
    if n < 2:
        raise ValueError("density feature needs |V| >= 2 (log|V| must be positive)")
    if m < 1:
        raise ValueError("density feature needs |E| >= 1")
    return math.log(m) / math.log(n)
