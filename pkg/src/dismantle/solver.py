"""Sample-cut-evaluate subproblem solver and the budget-adaptive dual-path solver.

A *trial* is one (seed, k) pair: sample a uniform spanning tree from the
seed, cut it into ``k`` balanced classes, and remove every graph edge that
crosses between classes.  Because every class is a connected subtree, the
components of the residual graph are exactly the classes, so a trial's LCC is
its largest class.

Trials are independent; the (k x seed) grid is farmed out to a thread pool
(the compiled kernels release the GIL) and reduced with a fixed
lexicographic key, so results never depend on the worker count.
"""

import heapq
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._rng import seed_list
from .graph import components, is_connected
from .partition import Partition, balanced_partition
from .planar import density_feature
from .ust import sample_ust

BASELINE = "baseline"
SMALL_BUDGET = "small_budget"
LARGE_BUDGET = "large_budget"

ALPHA_SHRINK = 0.8
ALPHA_RETRIES = 10
ALPHA_CEILING = 0.95

WORKERS_ENV = "DISMANTLE_WORKERS"


class CalibrationMissing(RuntimeError):
    pass


class CalibrationDomainError(ValueError):
    pass


@dataclass(eq=False)
class CutSolution:
    """A removed-edge set together with the vertex split it realises.

    ``cut_edges`` holds sorted graph EdgeIds and equals the set of edges
    whose endpoints get different ``class_of`` labels.
    """

    cut_edges: np.ndarray
    class_of: np.ndarray
    lcc: int
    k: int
    path: str
    seed: int | None = None
    seed_index: int | None = None
    budget: int | None = None
    partition: Partition | None = None
    tree_parent: np.ndarray | None = None
    f2: int | None = None
    t: float | None = None
    alpha: float | None = None
    runtime_ms: float = 0.0
    trial_lcc: np.ndarray | None = field(default=None, repr=False)
    trial_cuts: np.ndarray | None = field(default=None, repr=False)

    @property
    def cut_count(self):
        return len(self.cut_edges)

    @property
    def feasible(self):
        return self.budget is None or self.cut_count <= self.budget


@dataclass
class SolveConfig:
    budget: int
    samples: int = 50
    delta: int = 1
    master_seed: int = 0
    seeds: tuple | None = None
    calibration: object | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.seeds is None:
            self.seeds = seed_list(self.master_seed, self.samples)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.samples = len(self.seeds)
        if self.samples < 1:
            raise ValueError("need at least one seed")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


def default_workers():
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ----------------------------------------------------------- worker pools

_pools = {}


def _pool(workers):
    if workers not in _pools:
        _pools[workers] = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="trial")
    return _pools[workers]


def shutdown_pools():
    for p in _pools.values():
        p.shutdown(wait=True)
    _pools.clear()


def evaluate_trials(g, ks, seeds, workers=1):
    """LCC and crossing-edge count for every (k, seed) trial.

    Returns two ``(len(ks), len(seeds))`` int64 arrays.
    """
    ks = [int(k) for k in ks]
    seeds = np.asarray(seeds, dtype=np.uint64)
    lcc = np.empty((len(ks), len(seeds)), dtype=np.int64)
    cuts = np.empty_like(lcc)
    if g.n == 1:
        lcc[:] = 1
        cuts[:] = 0
        return lcc, cuts

    def run(ki, lo, hi):
        a, b = kernels.trial_batch(g.indptr, g.nbr, g.nbr_eid, g.eu, g.ev, 0,
                                   ks[ki], seeds[lo:hi])
        lcc[ki, lo:hi] = a
        cuts[ki, lo:hi] = b

    if workers <= 1:
        for ki in range(len(ks)):
            run(ki, 0, len(seeds))
        return lcc, cuts

    per_k = max(1, -(-workers // len(ks)))
    bounds = np.linspace(0, len(seeds), min(per_k, len(seeds)) + 1).astype(int)
    futures = [
        _pool(workers).submit(run, ki, lo, hi)
        for ki in range(len(ks))
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]
    for f in futures:
        f.result()
    return lcc, cuts


def _argbest(lcc, cuts, feasible=None):
    """Index of the lexicographically smallest (lcc, cuts, position) entry."""
    lcc = np.asarray(lcc).ravel()
    cuts = np.asarray(cuts).ravel()
    idx = np.arange(len(lcc))
    if feasible is not None:
        idx = idx[np.asarray(feasible).ravel()]
        if not len(idx):
            return None
    order = np.lexsort((idx, cuts[idx], lcc[idx]))
    return int(idx[order[0]])


# ------------------------------------------------------------ subproblem

def crossing_edges(g, partition):
    """EdgeIds whose endpoints fall into different classes.

    ``partition`` is a :class:`Partition` or a per-vertex class array.
    """
    cls = partition.class_of if isinstance(partition, Partition) else np.asarray(partition)
    return np.flatnonzero(cls[g.eu] != cls[g.ev])


def _realise(g, k, seeds, index, path, budget=None):
    seed = seeds[index]
    tree = sample_ust(g, seed)
    part = balanced_partition(tree, k)
    cut = crossing_edges(g, part)
    return CutSolution(
        cut_edges=cut,
        class_of=part.class_of,
        lcc=int(part.class_sizes.max()),
        k=k,
        path=path,
        seed=int(seed),
        seed_index=index,
        budget=budget,
        partition=part,
        tree_parent=tree.parent,
    )


def _trivial(g, path, budget=None):
    return CutSolution(
        cut_edges=np.zeros(0, dtype=np.int64),
        class_of=np.zeros(g.n, dtype=np.int64),
        lcc=g.n,
        k=1,
        path=path,
        budget=budget,
    )


def solve_subproblem(g, k, seeds, workers=1):
    """Best of ``len(seeds)`` sample-cut-evaluate trials at fixed ``k``.

    Selection: smallest LCC, then fewest crossing edges, then lowest seed
    position.
    """
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    if not 1 <= k <= g.n:
        raise ValueError(f"k must lie in [1, n={g.n}], got {k}")
    if not is_connected(g):
        raise ValueError("graph must be connected")
    if g.n == 1:
        return _trivial(g, BASELINE)
    lcc, cuts = evaluate_trials(g, [k], seeds, workers)
    best = _argbest(lcc[0], cuts[0])
    sol = _realise(g, k, seeds, best, BASELINE)
    sol.trial_lcc, sol.trial_cuts = lcc[0], cuts[0]
    return sol


def baseline_bisection(g, seeds, workers=1):
    """The k = 2 subproblem; its cut count is the dispatch threshold |F2|."""
    return solve_subproblem(g, 2, seeds, workers)


# --------------------------------------------------------- small budget

def estimate_alpha(cut, t, f2, cal, n):
    """Fraction of vertices to carve off, clamped to ``[2/n, 0.95]``."""
    if cal is None:
        raise CalibrationMissing(
            "no calibration loaded: run `dismantle calibrate` or pass --alpha directly"
        )
    if cut < 1 or f2 < 1 or t <= 0:
        raise ValueError("estimate_alpha needs cut >= 1, f2 >= 1, t > 0")
    cal.check_domain(t)
    raw = cal.B0 * t ** (-cal.gamma) * cut ** cal.beta1 * f2 ** (-cal.beta2)
    return min(max(raw, 2.0 / n), ALPHA_CEILING)


def corner_vertex(g):
    deg = g.degree()
    low = np.flatnonzero(deg == deg.min())
    if g.coords is not None and len(low) > 1:
        xy = g.coords[low]
        return int(low[np.lexsort((low, xy[:, 1], xy[:, 0]))[0]])
    return int(low[0])


def grow_subgraph(g, n_s, start=None):
    """Vertices of a connected region grown from the corner, in growth order.

    Each step adds the frontier vertex of smallest degree (ties: smaller
    index).  The growth is deterministic, so smaller regions are prefixes of
    larger ones.
    """
    if not 1 <= n_s <= g.n:
        raise ValueError(f"n_s must lie in [1, {g.n}]")
    deg = g.degree()
    start = corner_vertex(g) if start is None else start
    taken = np.zeros(g.n, dtype=bool)
    queued = np.zeros(g.n, dtype=bool)
    heap = [(int(deg[start]), start)]
    queued[start] = True
    order = []
    while heap and len(order) < n_s:
        _, u = heapq.heappop(heap)
        taken[u] = True
        order.append(u)
        for v in g.neighbors(u).tolist():
            if not queued[v]:
                queued[v] = True
                heapq.heappush(heap, (int(deg[v]), v))
    return np.array(order, dtype=np.int64)


@dataclass(frozen=True, order=True)
class _Candidate:
    lcc: int
    cut_count: int
    rank: int
    cut_edges: np.ndarray = field(compare=False)
    detached: np.ndarray = field(compare=False)
    sub: object = field(compare=False)


def detach_candidates(g, region, seeds, workers=1):
    """Cut sets that split off the region or one half of its bisection.

    ``region`` is a vertex array inducing a connected subgraph.  When it has
    at least two vertices its k = 2 subproblem is solved and each class ``C``
    yields the candidate "all edges between C and the rest of g"; the region
    itself is always a candidate.  Every candidate is scored by the true
    residual LCC of ``g``.
    """
    masks = []
    sub_sol = None
    if len(region) >= 2:
        sub, verts, _ = g.subgraph(region)
        sub_sol = solve_subproblem(sub, 2, seeds, workers)
        for c in range(2):
            mask = np.zeros(g.n, dtype=bool)
            mask[verts[sub_sol.class_of == c]] = True
            masks.append(mask)
    mask = np.zeros(g.n, dtype=bool)
    mask[region] = True
    masks.append(mask)
    out = []
    for rank, mask in enumerate(masks):
        cut = g.boundary_edges(mask)
        out.append(_Candidate(components(g, cut).lcc, len(cut), rank, cut, mask, sub_sol))
    return out


def solve_small_budget(g, cfg, f2_solution, workers=1):
    """Detach the best region-derived piece the budget affords.

    Meant for ``cfg.budget < |F2|`` (what :func:`solve` dispatches here).
    The region size is ``floor(alpha * n)``; when no candidate fits the
    budget, alpha shrinks by 0.8 up to ten times, after which the empty cut
    is returned.
    """
    budget = cfg.budget
    n = g.n
    f2 = f2_solution.cut_count
    empty = _trivial(g, SMALL_BUDGET, budget)
    if budget == 0:
        return empty
    t = density_feature(g)
    alpha = cfg.alpha if cfg.alpha is not None else estimate_alpha(budget, t, f2, cfg.calibration, n)
    empty.alpha = alpha
    order = grow_subgraph(g, n)
    tried = {}
    for _ in range(ALPHA_RETRIES + 1):
        n_s = min(int(math.floor(alpha * n)), n - 1)
        if n_s >= 1:
            if n_s not in tried:
                tried[n_s] = detach_candidates(g, order[:n_s], cfg.seeds, workers)
            feasible = [c for c in tried[n_s] if c.cut_count <= budget]
            if feasible:
                best = min(feasible)
                sub = best.sub
                return CutSolution(
                    cut_edges=best.cut_edges,
                    class_of=np.where(best.detached, 0, 1).astype(np.int64),
                    lcc=best.lcc,
                    k=2,
                    path=SMALL_BUDGET,
                    seed=None if sub is None else sub.seed,
                    seed_index=None if sub is None else sub.seed_index,
                    budget=budget,
                    partition=None if sub is None else sub.partition,
                    alpha=alpha,
                )
        alpha *= ALPHA_SHRINK
    return empty


# --------------------------------------------------------- large budget

def round_half_up(x):
    return int(math.floor(x + 0.5))


def estimate_k(cut, f2, t, cal, n=None):
    """Partition count the budget supports under the linear cut-cost prior."""
    if cal is None:
        raise CalibrationMissing(
            "no calibration loaded: run `dismantle calibrate` or pass --calib"
        )
    if cut < f2:
        raise ValueError("estimate_k requires cut >= |F2|")
    cal.check_domain(t)
    s = cal.slope(t)
    if s <= 0:
        raise CalibrationDomainError(
            f"fitted slope s(t={t:.4f}) = {s:.4g} <= 0; refusing to extrapolate"
        )
    k0 = max(2, round_half_up(2 + (cut - f2) / s))
    if n is not None:
        k0 = min(k0, n)
    return k0


def search_window(k0, delta, n, full=False):
    """``k0 +- delta`` within ``[2, n]``, plus 2; plus ``n`` when ``full``."""
    ks = {k for k in range(k0 - delta, k0 + delta + 1) if 2 <= k <= n}
    ks.add(2)
    if full:
        ks.add(n)
    return sorted(ks)


def solve_large_budget(g, cfg, f2_solution, workers=1):
    """Best feasible multi-cut over the window around the predicted k.

    The k = 2 baseline trials are reused and always take part, so a feasible
    answer exists.  Within the grid the key is (lcc, cut count, k, seed
    position) among trials whose cut fits the budget.
    """
    budget = cfg.budget
    f2 = f2_solution.cut_count
    if budget < f2:
        raise ValueError("large-budget path requires budget >= |F2|")
    t = density_feature(g)
    k0 = estimate_k(budget, f2, t, cfg.calibration, g.n)
    # a budget covering every edge can always isolate all vertices
    ks = search_window(k0, cfg.delta, g.n, full=budget >= g.m)
    others = [k for k in ks if k != 2]
    m = len(cfg.seeds)
    lcc = np.empty((len(ks), m), dtype=np.int64)
    cuts = np.empty_like(lcc)
    if f2_solution.trial_lcc is not None:
        lcc[0], cuts[0] = f2_solution.trial_lcc, f2_solution.trial_cuts
    else:
        lcc[0], cuts[0] = evaluate_trials(g, [2], cfg.seeds, workers)
    if others:
        lcc[1:], cuts[1:] = evaluate_trials(g, others, cfg.seeds, workers)
    # row-major flat index orders ties by k, then seed position
    best = _argbest(lcc, cuts, cuts <= budget)
    ki, si = divmod(best, m)
    sol = _realise(g, ks[ki], cfg.seeds, si, LARGE_BUDGET, budget)
    if sol.cut_count != cuts[ki, si] or sol.lcc != lcc[ki, si]:
        raise RuntimeError("trial replay diverged from the batch kernel")
    return sol


# ---------------------------------------------------------------- driver

def solve(g, cfg, workers=1):
    """Dual-path budgeted dismantling of a connected graph."""
    if not is_connected(g):
        raise ValueError("graph must be connected")
    if cfg.budget > g.m:
        raise ValueError(f"budget {cfg.budget} exceeds |E| = {g.m}")
    start = time.perf_counter()
    if g.n < 2:
        sol = _trivial(g, SMALL_BUDGET, cfg.budget)
        sol.f2 = 0
    else:
        t = density_feature(g)
        base = baseline_bisection(g, cfg.seeds, workers)
        f2 = base.cut_count
        if cfg.budget < f2:
            sol = solve_small_budget(g, cfg, base, workers)
        else:
            sol = solve_large_budget(g, cfg, base, workers)
        sol.f2 = f2
        sol.t = t
    sol.runtime_ms = (time.perf_counter() - start) * 1000.0
    return sol


def solution_to_dict(g, sol, *, seeds_used=None, workers=None, stable=False, debug=False):
    """JSON-ready record of a solution."""
    from .bench import per_edge_efficiency

    out = {
        "graph": {"v": g.n, "e": g.m},
        "budget": sol.budget,
        "path": sol.path,
        "k": sol.k,
        "t": sol.t,
        "f2": sol.f2,
    }
    if sol.path == SMALL_BUDGET:
        out["alpha"] = sol.alpha
    out.update({
        "cut_edges": g.edge_pairs(sol.cut_edges),
        "cut_edge_ids": [int(e) for e in sol.cut_edges],
        "cut_count": sol.cut_count,
        "lcc": sol.lcc,
        "lcc_ratio": sol.lcc / g.n if g.n else 0.0,
        "eta": per_edge_efficiency(g, sol.cut_edges) if sol.cut_count else None,
        "seed": sol.seed,
        "seeds_used": seeds_used,
        "runtime_ms": 0.0 if stable else sol.runtime_ms,
        "worker_count": None if stable else workers,
    })
    if debug and sol.tree_parent is not None:
        out["tree_parent"] = [int(p) for p in sol.tree_parent]
    return out
