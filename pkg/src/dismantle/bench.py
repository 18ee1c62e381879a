"""Metrics, the random-removal baseline, sweeps, and timing reports."""

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from ._rng import Xoshiro256, derive_seed
from .graph import components
from .planar import density_feature, generate
from .solver import _argbest, evaluate_trials, solve, solve_subproblem

METRICS_HEADER = ["graph", "V", "E", "t", "method", "budget", "cut_ratio", "cut_used",
                  "lcc", "lcc_ratio", "eta", "runtime_ms", "seed_count"]


class DeterminismError(RuntimeError):
    pass


@dataclass(frozen=True)
class MetricsRow:
    graph: str
    V: int
    E: int
    t: float
    method: str
    budget: int
    cut_ratio: float
    cut_used: float
    lcc: float
    lcc_ratio: float
    eta: float | None
    runtime_ms: float
    seed_count: int
    lcc_best: int | None = None


@dataclass(frozen=True)
class SpeedupReport:
    p: int
    T_p: float
    S_p: float
    E_p: float


def per_edge_efficiency(g, removed):
    """LCC reduction per removed edge, ``(|V| - L(G - F)) / |F|``."""
    removed = np.asarray(removed, dtype=np.int64)
    if len(removed) == 0:
        raise ValueError("per-edge efficiency is undefined for an empty cut")
    return (g.n - components(g, removed).lcc) / len(removed)


def random_baseline(g, budget, trials=50, seed=0, graph_id="g"):
    """Remove ``budget`` uniformly random edges, ``trials`` times."""
    if not 0 <= budget <= g.m:
        raise ValueError(f"budget must lie in [0, |E| = {g.m}]")
    start = time.perf_counter()
    sizes = []
    for i in range(trials):
        removed = Xoshiro256(derive_seed(seed, i)).sample(g.m, budget)
        sizes.append(components(g, removed).lcc)
    elapsed = (time.perf_counter() - start) * 1000.0 / max(trials, 1)
    mean = statistics.fmean(sizes)
    return MetricsRow(
        graph=graph_id, V=g.n, E=g.m, t=density_feature(g), method="random",
        budget=budget, cut_ratio=budget / g.m, cut_used=budget, lcc=mean,
        lcc_ratio=mean / g.n, eta=(g.n - mean) / budget if budget else None,
        runtime_ms=elapsed, seed_count=trials, lcc_best=min(sizes),
    )


def solution_row(g, sol, graph_id="g", seed_count=0):
    return MetricsRow(
        graph=graph_id, V=g.n, E=g.m, t=density_feature(g), method=sol.path,
        budget=sol.budget, cut_ratio=sol.budget / g.m, cut_used=sol.cut_count,
        lcc=sol.lcc, lcc_ratio=sol.lcc / g.n,
        eta=per_edge_efficiency(g, sol.cut_edges) if sol.cut_count else None,
        runtime_ms=sol.runtime_ms, seed_count=seed_count, lcc_best=sol.lcc,
    )


def budget_sweep(g, fractions, cfg, graph_id="g", random_trials=0, workers=1):
    """Solve at ``floor(frac * |E|)`` for each fraction, optionally with baselines."""
    rows = []
    for frac in fractions:
        if not 0.0 < frac <= 1.0:
            raise ValueError(f"budget fraction {frac} outside (0, 1]")
        budget = int(math.floor(frac * g.m))
        sol = solve(g, replace(cfg, budget=budget), workers)
        rows.append(solution_row(g, sol, graph_id, len(cfg.seeds)))
        if random_trials:
            rows.append(random_baseline(g, budget, random_trials, cfg.master_seed, graph_id))
    return rows


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def metrics_to_csv(rows, stable=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for r in rows:
        vals = [getattr(r, h) for h in METRICS_HEADER]
        if stable:
            vals[METRICS_HEADER.index("runtime_ms")] = 0.0
        w.writerow([_fmt(v) for v in vals])
    return buf.getvalue()


def layout_csv(g, class_of):
    """``vertex,x,y,class`` rows for external plotting."""
    if g.coords is None:
        raise ValueError("graph has no coordinates to export")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "x", "y", "class"])
    for v, ((x, y), c) in enumerate(zip(g.coords.tolist(), np.asarray(class_of).tolist())):
        w.writerow([v, repr(x), repr(y), c])
    return buf.getvalue()


def median_time(fn, repeats=3):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def loglog_slope(xs, ys):
    if len(xs) < 2:
        return None
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def runtime_scaling(specs, seeds, k=4, repeats=3, workers=1):
    """Median subproblem wall time per generated graph and the log-log slope vs |E|.

    Graph generation is outside the timed region.
    """
    table = []
    for spec in specs:
        g = generate(spec)
        solve_subproblem(g, k, seeds[:1], workers)  # warm-up
        secs = median_time(lambda: solve_subproblem(g, k, seeds, workers), repeats)
        table.append({"V": g.n, "E": g.m, "k": k, "m": len(seeds), "seconds": secs})
    slope = loglog_slope([r["E"] for r in table], [r["seconds"] for r in table])
    return table, slope


def speedup_report(g, ks, seeds, p_values, repeats=3):
    """Wall time of the same (k x seed) grid at each worker count.

    Raises :class:`DeterminismError` if any worker count changes the grid
    outcome or the selected trial.
    """
    if 1 not in p_values:
        raise ValueError("p_values must include 1")
    results = {}
    times = {}
    for p in sorted(set(p_values)):
        out = {}

        def run():
            lcc, cuts = evaluate_trials(g, ks, seeds, p)
            out["grid"] = (lcc, cuts)

        times[p] = median_time(run, repeats)
        results[p] = out["grid"]
    ref_lcc, ref_cuts = results[1]
    ref_best = _argbest(ref_lcc, ref_cuts)
    for p, (lcc, cuts) in results.items():
        if not (np.array_equal(lcc, ref_lcc) and np.array_equal(cuts, ref_cuts)) \
                or _argbest(lcc, cuts) != ref_best:
            raise DeterminismError(f"trial grid differs between p=1 and p={p}")
    t1 = times[1]
    return [SpeedupReport(p, times[p], t1 / times[p], t1 / times[p] / p) for p in sorted(times)]
