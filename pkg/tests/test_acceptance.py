"""Acceptance suite: one test and one verdict line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdicts are repeated
in an "acceptance criteria" section at the end of the run.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from _report import record
from dismantle._rng import seed_list
from dismantle.bench import budget_sweep, runtime_scaling, speedup_report
from dismantle.calibration import AlphaRecord, calibrate, fit_alpha, fit_slope, SweepRecord
from dismantle.cli import run
from dismantle.graph import Graph, components, cycle_graph, path_graph
from dismantle.partition import balanced_partition
from dismantle.planar import GenSpec, generate
from dismantle.solver import (
    LARGE_BUDGET,
    SMALL_BUDGET,
    SolveConfig,
    baseline_bisection,
    crossing_edges,
    solve,
)
from dismantle.ust import SpanningTree, sample_ust
from oracles import chi2_sf, min_lcc, random_connected, rng, spanning_trees, union_find_lcc


def _verdict(ok):
    return "PASS" if ok else "FAIL"


# 1 ------------------------------------------------------------------------

def test_criterion_1_ust_uniformity():
    graphs = {
        "K3": cycle_graph(3),
        "C4": cycle_graph(4),
        "C5": cycle_graph(5),
        "K4-e": Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
    }
    start = time.perf_counter()
    pvals = {}
    for i, (name, g) in enumerate(graphs.items()):
        trees = spanning_trees(g.n, [tuple(e) for e in g.edge_pairs()])
        assert len(trees) <= 16
        counts = dict.fromkeys(trees, 0)
        for s in seed_list(1000 + i, 10_000):
            key = frozenset(int(e) for e in sample_ust(g, s).edge_ids())
            counts[key] += 1  # KeyError would mean a non-tree output
        exp = 10_000 / len(trees)
        stat = sum((c - exp) ** 2 / exp for c in counts.values())
        pvals[name] = chi2_sf(stat, len(trees) - 1)
    elapsed = time.perf_counter() - start
    ok = all(p > 0.001 for p in pvals.values()) and elapsed < 10
    shown = " ".join(f"{k}:p={v:.3f}" for k, v in pvals.items())
    record(1, _verdict(ok), f"chi-square over 1e4 samples each, {shown}, {elapsed:.1f}s (< 10s)")
    assert ok


# 2 ------------------------------------------------------------------------

def _tree_classes_connected(tree, part):
    n = len(tree.parent)
    cut = {int(e) for e in part.tree_cuts}
    inside = [(v, int(tree.parent[v])) for v in range(n)
              if tree.parent[v] >= 0 and int(tree.parent_edge[v]) not in cut]
    if any(part.class_of[u] != part.class_of[v] for u, v in inside):
        return False
    _, sizes = union_find_lcc(n, inside)
    return sorted(sizes) == sorted(part.class_sizes.tolist())


def test_criterion_2_partition_invariants():
    r = rng(2)
    bad = []
    for case in range(500):
        n = r.randint(1, 200)
        m = r.randint(n - 1, min(n * (n - 1) // 2, 3 * n))
        g = Graph(n, random_connected(r, n, m))
        k = r.randint(1, n)
        tree = sample_ust(g, r.getrandbits(64))
        part = balanced_partition(tree, k)
        ok = (len(part.class_sizes) == k and int(part.class_sizes.sum()) == n
              and bool(np.all(part.class_sizes > 0)) and len(part.tree_cuts) == k - 1
              and _tree_classes_connected(tree, part))
        if not ok:
            bad.append(("graph", n, k))
    for case in range(500):
        n = r.randint(1, 200)
        k = r.randint(1, n)
        idx = np.arange(-1, n - 1, dtype=np.int64)
        part = balanced_partition(SpanningTree(0, idx, idx.copy(), path_graph(n)), k)
        if int(part.class_sizes.max()) != math.ceil(n / k) or len(part.tree_cuts) != k - 1:
            bad.append(("path", n, k))
    ok = not bad
    record(2, _verdict(ok), f"500 random (graph, k) + 500 path-tree cases, n <= 200, violations={len(bad)}")
    assert ok, bad[:5]


# 3 ------------------------------------------------------------------------

def test_criterion_3_crossing_oracle():
    r = rng(3)
    bad = 0
    for case in range(200):
        n = r.randint(2, 200)
        m = r.randint(n - 1, min(n * (n - 1) // 2, 3 * n))
        edges = random_connected(r, n, m)
        g = Graph(n, edges)
        k = r.randint(1, n)
        part = balanced_partition(sample_ust(g, r.getrandbits(64)), k)
        cut = crossing_edges(g, part)
        lab = components(g, cut)
        same = {(int(a), int(b)) for a, b in zip(lab.labels, part.class_of)}
        ok = (lab.count == k
              and sorted(lab.sizes.tolist()) == sorted(part.class_sizes.tolist())
              and len(same) == k
              and union_find_lcc(n, edges, cut.tolist())[0] == int(part.class_sizes.max()))
        bad += not ok
    record(3, _verdict(bad == 0), f"200 random partitions, mismatches={bad} (zero tolerance)")
    assert bad == 0


# 4 ------------------------------------------------------------------------

def _small_instances(seed=4, count=50):
    r = rng(seed)
    out = []
    for case in range(count):
        n = r.randint(4, 10)
        tree = case % 3 == 0
        m = n - 1 if tree else r.randint(n, min(15, n * (n - 1) // 2))
        edges = random_connected(r, n, m)
        out.append((Graph(n, edges), edges, r.randint(0, min(4, m))))
    return out


def _small_corpus():
    # every n at tree, middle and maximum density, so t covers all instances
    r = rng(40)
    corpus = {}
    for n in range(4, 11):
        top = min(15, n * (n - 1) // 2)
        for m in sorted({n - 1, (n - 1 + top) // 2, top}):
            corpus[f"s{n}_{m}"] = Graph(n, random_connected(r, n, m))
    return corpus


def _score_small(instances, model):
    ratio_bad, tree_bad, trees = [], [], 0
    for g, edges, budget in instances:
        sol = solve(g, SolveConfig(budget=budget, samples=50, calibration=model))
        opt = min_lcc(g.n, edges, budget)
        assert sol.cut_count <= budget
        if sol.lcc > 2 * opt:
            ratio_bad.append((g.n, g.m, budget, sol.lcc, opt))
        if g.m == g.n - 1:
            trees += 1
            if sol.lcc != opt:
                tree_bad.append((g.n, budget, sol.lcc, opt))
    return ratio_bad, tree_bad, trees


def test_criterion_4_small_instance_near_optimality():
    start = time.perf_counter()
    model, _, _ = calibrate(_small_corpus(), seed_list(0, 50), (2, 4), alpha_step=1)
    ratio_bad, tree_bad, trees = _score_small(_small_instances(), model)
    elapsed = time.perf_counter() - start
    ok = not ratio_bad and not tree_bad and elapsed < 120
    # the verdict is the 50-instance draw above; further draws are reported
    # because tree optimality of the one-shot greedy is not guaranteed
    extra = [_score_small(_small_instances(seed, 50), model) for seed in range(1000, 1010)]
    x_ratio = sum(len(e[0]) for e in extra)
    x_tree_bad = sum(len(e[1]) for e in extra)
    x_trees = sum(e[2] for e in extra)
    record(4, _verdict(ok),
           f"50 graphs |V|<=10 |E|<=15 budget<=4: 2x-bound violations={len(ratio_bad)}, "
           f"tree instances optimal {trees - len(tree_bad)}/{trees}, {elapsed:.1f}s (< 120s); "
           f"10 further draws: 2x violations={x_ratio}/500, "
           f"trees optimal {x_trees - x_tree_bad}/{x_trees}")
    assert ok


# 5 ------------------------------------------------------------------------

FRACTIONS = [0.05, 0.10, 0.15, 0.20]


def test_criterion_5_budget_trend(corpus200, calibrated200):
    model = calibrated200[0]
    ours = {f: [] for f in FRACTIONS}
    rand = {f: [] for f in FRACTIONS}
    for gid, g in corpus200.items():
        cfg = SolveConfig(budget=0, samples=50, calibration=model)
        rows = budget_sweep(g, FRACTIONS, cfg, gid, random_trials=50)
        for f, a, b in zip(FRACTIONS, rows[0::2], rows[1::2]):
            ours[f].append(a.lcc_ratio)
            rand[f].append(b.lcc_ratio)
            assert a.cut_used <= a.budget
    means = [float(np.mean(ours[f])) for f in FRACTIONS]
    rmeans = [float(np.mean(rand[f])) for f in FRACTIONS]
    ok = all(b <= a + 0.02 for a, b in zip(means, means[1:]))
    dominance = all(a <= b for a, b in zip(means, rmeans))
    record(5, _verdict(ok),
           "mean L/|V| at 5/10/15/20%: " + " ".join(f"{x:.3f}" for x in means)
           + " (random: " + " ".join(f"{x:.3f}" for x in rmeans) + f"; solver <= random: {dominance})")
    assert ok


# 6 ------------------------------------------------------------------------

def _few_inversions(seq, increasing):
    inv = []
    for a, b in zip(seq, seq[1:]):
        worse = b < a if increasing else b > a
        if worse:
            inv.append(abs(b - a) / max(abs(a), 1e-12))
    return len(inv) <= 1 and all(x <= 0.05 for x in inv), inv


def test_criterion_6_k_sweep_trends(corpus200, calibrated200):
    sweep = calibrated200[1]
    recs = [r for r in sweep if r.graph == "g550"]
    assert [r.k for r in recs] == list(range(2, 11))
    f_ok, f_inv = _few_inversions([r.F_mean for r in recs], increasing=True)
    l_ok, l_inv = _few_inversions([r.lcc_mean for r in recs], increasing=False)
    ok = f_ok and l_ok
    record(6, _verdict(ok),
           f"|V|=200 |E|=550, k=2..10: mean|F| inversions={len(f_inv)}, mean lcc inversions={len(l_inv)}")
    assert ok


# 7 ------------------------------------------------------------------------

def test_criterion_7_slope_model_r2(corpus200, calibrated200):
    sweep = calibrated200[1]
    r2s = {}
    for gid in corpus200:
        recs = [r for r in sweep if r.graph == gid]
        x = np.array([r.k - 2 for r in recs], dtype=float)
        y = np.array([r.F_mean for r in recs])
        design = np.column_stack([x, np.ones_like(x)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        r2s[gid] = 1.0 - float(((y - design @ coef) ** 2).sum()) / float(((y - y.mean()) ** 2).sum())
    good = sum(v >= 0.85 for v in r2s.values())
    ok = good >= 8
    record(7, _verdict(ok), f"per-graph r^2 >= 0.85 on {good}/10 graphs "
                            f"(min {min(r2s.values()):.3f}, max {max(r2s.values()):.3f})")
    assert ok


# 8 ------------------------------------------------------------------------

def test_criterion_8_runtime_scaling():
    start = time.perf_counter()
    specs = [GenSpec(200, 550, 1), GenSpec(2000, 5500, 1), GenSpec(10000, 29000, 1)]
    table, slope = runtime_scaling(specs, seed_list(0, 10), k=4, repeats=5)
    elapsed = time.perf_counter() - start
    ok = 0.8 <= slope <= 1.3 and elapsed < 900
    times = " ".join(f"|E|={r['E']}:{r['seconds'] * 1e3:.2f}ms" for r in table)
    record(8, _verdict(ok), f"log-log slope {slope:.3f} in [0.8, 1.3]; {times}; {elapsed:.1f}s total")
    assert ok


# 9 ------------------------------------------------------------------------

def test_criterion_9_determinism(tmp_path):
    graph = tmp_path / "g.txt"
    assert run(["gen", "--nodes", "200", "--edges", "450", "--seed", "9", "--out", str(graph)]) == 0
    cal = tmp_path / "cal.json"
    others = []
    for i, e in enumerate((300, 400, 500)):
        p = tmp_path / f"c{i}.txt"
        assert run(["gen", "--nodes", "200", "--edges", str(e), "--seed", str(20 + i), "--out", str(p)]) == 0
        others.append(str(p))
    assert run(["calibrate", "--graph", *others, "--samples", "20", "--workers", "1", "--out", str(cal)]) == 0
    blobs = {}
    for p in (1, 2, 4):
        for frac in ("0.03", "0.15"):
            out = tmp_path / f"sol_{p}_{frac}.json"
            assert run(["solve", "--graph", str(graph), "--budget-frac", frac, "--calib", str(cal),
                        "--workers", str(p), "--stable-output", "--out", str(out)]) == 0
            blobs.setdefault(frac, []).append(out.read_bytes())
        sweep = tmp_path / f"sweep_{p}.csv"
        assert run(["sweep-budget", "--graph", str(graph), "--calib", str(cal), "--workers", str(p),
                    "--random-trials", "5", "--stable-output", "--out", str(sweep)]) == 0
        blobs.setdefault("sweep", []).append(sweep.read_bytes())
    ok = all(len(set(v)) == 1 for v in blobs.values())
    paths = sorted({json.loads(blobs[f][0])["path"] for f in ("0.03", "0.15")})
    cores = os.cpu_count() or 1
    note = "S4 check runs separately" if cores >= 4 else f"S4 >= 2.0 not measurable: {cores} CPU core(s)"
    record(9, _verdict(ok), f"--stable-output artifacts byte-identical for p in {{1,2,4}} "
                            f"(paths {paths}); {note}")
    assert ok


@pytest.mark.skipif((os.cpu_count() or 1) < 4, reason="parallel speedup needs >= 4 cores")
def test_criterion_9_speedup():
    g = generate(GenSpec(10000, 29000, 7))
    reps = speedup_report(g, [2, 3, 4, 5], seed_list(0, 16), [1, 2, 4], repeats=3)
    s4 = next(r.S_p for r in reps if r.p == 4)
    record("9b", _verdict(s4 >= 2.0), f"64-trial grid on |E|=29000: S4={s4:.2f} (>= 2.0)")
    assert s4 >= 2.0


# 10 -----------------------------------------------------------------------

def test_criterion_10_calibration_recovery():
    truth_s = (0.75, 2.5)
    ts = [1.02, 1.08, 1.15, 1.21]
    recs = [SweepRecord(f"g{i}", 200, 400, t, k, 9.0 + (truth_s[0] * math.log(t) + truth_s[1]) * (k - 2),
                        0.0, 1.0, 0.0, 1) for i, t in enumerate(ts) for k in range(2, 11)]
    c0, c1, _ = fit_slope(recs)
    truth_a = (0.21, 1.7, 0.9, 0.45)
    arecs = [AlphaRecord(c, t, f2, truth_a[0] * t ** -truth_a[1] * c ** truth_a[2] * f2 ** -truth_a[3])
             for c in (1, 2, 4, 7) for t in ts for f2 in (10, 17, 30)]
    est_a = fit_alpha(arecs)[:4]
    errs = [abs(e - t) / abs(t) for e, t in zip((c0, c1, *est_a), (*truth_s, *truth_a))]
    ok = max(errs) <= 1e-6
    record(10, _verdict(ok), f"max relative error {max(errs):.2e} (<= 1e-6) over c0,c1,B0,gamma,beta1,beta2")
    assert ok


# 11 -----------------------------------------------------------------------

def test_criterion_11_dispatch(corpus200, calibrated200):
    model = calibrated200[0]
    seeds = seed_list(0, 50)
    bad, checked = [], 0
    for gid, g in corpus200.items():
        base = baseline_bisection(g, seeds)
        f2 = base.cut_count
        budgets = sorted({0, 1, f2 // 2, f2 - 1, f2, f2 + 1, int(0.1 * g.m), int(0.2 * g.m), g.m} - {-1})
        for b in budgets:
            sol = solve(g, SolveConfig(budget=b, samples=50, calibration=model))
            checked += 1
            want = SMALL_BUDGET if b < f2 else LARGE_BUDGET
            ok = sol.path == want and sol.cut_count <= b and sol.f2 == f2
            if want == LARGE_BUDGET:
                ok = ok and sol.lcc <= base.lcc
            ok = ok and components(g, sol.cut_edges).lcc == sol.lcc
            if not ok:
                bad.append((gid, b, f2, sol.path, sol.lcc, base.lcc))
    record(11, _verdict(not bad), f"{checked} solves around |F2| on 10 graphs, violations={len(bad)}")
    assert not bad, bad[:5]
