"""Command-line entry point: ``dismantle <subcommand> ...``.

Trial seeds are expanded from ``--seed`` with ``derive_seed`` (splitmix64),
so identical invocations give byte-identical files once ``--stable-output``
zeroes the timing fields.  The worker count comes from ``--workers``, else
``DISMANTLE_WORKERS``, else the number of CPUs.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

from . import kernels
from ._rng import seed_list
from .bench import (
    budget_sweep,
    layout_csv,
    metrics_to_csv,
    random_baseline,
    runtime_scaling,
    speedup_report,
)
from .calibration import CalibrationModel, calibrate, sweep_k, sweep_to_csv
from .graph import read_graph, save_graph
from .planar import GenSpec, generate
from .solver import SolveConfig, default_workers, shutdown_pools, solution_to_dict, solve

log = logging.getLogger("dismantle")


def write_atomic(path, data):
    """Write via a temp file in the target directory, then rename."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _graph_id(path):
    return Path(path).stem


def _budget(args, g):
    if args.budget is not None:
        return args.budget
    if not 0.0 <= args.budget_frac <= 1.0:
        raise ValueError("--budget-frac must lie in [0, 1]")
    return int(math.floor(args.budget_frac * g.m))


def _calibration(args):
    return CalibrationModel.load(args.calib) if args.calib else None


# ------------------------------------------------------------ subcommands

def cmd_gen(args):
    g = generate(GenSpec(args.nodes, args.edges, args.seed))
    write_atomic(args.out, save_graph(g))
    print(f"nodes={g.n} edges={g.m} seed={args.seed} out={args.out}")


def cmd_solve(args):
    g = read_graph(args.graph)
    cfg = SolveConfig(
        budget=_budget(args, g), samples=args.samples, delta=args.delta,
        master_seed=args.seed, calibration=_calibration(args), alpha=args.alpha,
    )
    sol = solve(g, cfg, args.workers)
    record = solution_to_dict(g, sol, seeds_used=len(cfg.seeds), workers=args.workers,
                              stable=args.stable_output, debug=args.debug_tree)
    if args.out:
        write_atomic(args.out, json.dumps(record) + "\n")
    if args.layout:
        write_atomic(args.layout, layout_csv(g, sol.class_of))
    print(f"lcc={sol.lcc} lcc_ratio={sol.lcc / g.n:.6f} cut_used={sol.cut_count} path={sol.path}")


def cmd_sweep_k(args):
    g = read_graph(args.graph)
    seeds = seed_list(args.seed, args.samples)
    k_max = min(args.k_max, g.n)
    recs = sweep_k(g, (args.k_min, k_max), seeds, _graph_id(args.graph), args.workers)
    write_atomic(args.out, sweep_to_csv(recs))
    last = recs[-1]
    print(f"records={len(recs)} k={args.k_min}..{k_max} F_mean(k_max)={last.F_mean:.3f} "
          f"lcc_mean(k_max)={last.lcc_mean:.3f}")


def cmd_sweep_budget(args):
    cal = _calibration(args)
    rows = []
    for path in args.graph:
        g = read_graph(path)
        cfg = SolveConfig(budget=0, samples=args.samples, delta=args.delta,
                          master_seed=args.seed, calibration=cal, alpha=args.alpha)
        rows.extend(budget_sweep(g, args.fractions, cfg, _graph_id(path),
                                 args.random_trials, args.workers))
    write_atomic(args.out, metrics_to_csv(rows, stable=args.stable_output))
    ours = [r for r in rows if r.method != "random"]
    print(f"rows={len(rows)} graphs={len(args.graph)} "
          f"mean_lcc_ratio={sum(r.lcc_ratio for r in ours) / len(ours):.6f}")


def cmd_calibrate(args):
    graphs = {_graph_id(p): read_graph(p) for p in args.graph}
    seeds = seed_list(args.seed, args.samples)
    model, sweep, alpha_recs = calibrate(
        graphs, seeds, (args.k_min, args.k_max), args.workers, args.alpha_step,
        corpus=f"{len(graphs)} graphs ({', '.join(graphs)}), k={args.k_min}..{args.k_max}, "
               f"m={args.samples}, seed={args.seed}",
    )
    write_atomic(args.out, model.dumps())
    if args.sweep_out:
        write_atomic(args.sweep_out, sweep_to_csv(sweep))
    print(f"c0={model.c0:.6g} c1={model.c1:.6g} r2_slope={model.r2_slope:.4f} "
          f"B0={model.B0:.6g} gamma={model.gamma:.6g} beta1={model.beta1:.6g} "
          f"beta2={model.beta2:.6g} r2_alpha={model.r2_alpha:.4f} alpha_records={len(alpha_recs)}")


def cmd_baseline(args):
    g = read_graph(args.graph)
    row = random_baseline(g, _budget(args, g), args.trials, args.seed, _graph_id(args.graph))
    write_atomic(args.out, metrics_to_csv([row], stable=args.stable_output))
    print(f"lcc={row.lcc:.3f} lcc_ratio={row.lcc_ratio:.6f} cut_used={row.cut_used} path=random")


def cmd_scaling(args):
    if len(args.nodes) != len(args.edges):
        raise ValueError("--nodes and --edges need the same number of values")
    specs = [GenSpec(n, e, args.gen_seed) for n, e in zip(args.nodes, args.edges)]
    seeds = seed_list(args.seed, args.samples)
    table, slope = runtime_scaling(specs, seeds, args.k, args.repeats, args.workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["V", "E", "k", "m", "seconds"])
    for r in table:
        w.writerow([r["V"], r["E"], r["k"], r["m"], repr(r["seconds"])])
    write_atomic(args.out, buf.getvalue())
    shown = "n/a" if slope is None else f"{slope:.3f}"
    print(f"backend={kernels.BACKEND} loglog_slope={shown} sizes={len(table)}")


def cmd_speedup(args):
    g = read_graph(args.graph)
    seeds = seed_list(args.seed, args.samples)
    ks = list(range(args.k_min, args.k_max + 1))
    reports = speedup_report(g, ks, seeds, args.workers_list, args.repeats)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "T_p", "S_p", "E_p"])
    for r in reports:
        w.writerow([r.p, repr(r.T_p), repr(r.S_p), repr(r.E_p)])
    write_atomic(args.out, buf.getvalue())
    print(" ".join(f"S_{r.p}={r.S_p:.2f}" for r in reports) + f" trials={len(ks) * len(seeds)}")


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(
        prog="dismantle",
        description="Spanning-tree-skeleton dismantling of planar graphs under an edge budget.",
    )
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-vv for debug)")
    sub = p.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def common(sp, seeds=True):
        sp.add_argument("--workers", type=int, default=None,
                        help="worker threads (default: $DISMANTLE_WORKERS or CPU count)")
        if seeds:
            sp.add_argument("--samples", type=int, default=50, help="spanning-tree samples m (default 50)")
            sp.add_argument("--seed", type=int, default=0, help="master seed for trial seeds")

    def budget_args(sp):
        grp = sp.add_mutually_exclusive_group(required=True)
        grp.add_argument("--budget", type=int, help="edge budget (absolute)")
        grp.add_argument("--budget-frac", type=float, help="edge budget as a fraction of |E|")

    sp = sub.add_parser("gen", help="generate a random connected planar graph")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--edges", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve", help="dual-path budgeted dismantling")
    sp.add_argument("--graph", required=True)
    budget_args(sp)
    common(sp)
    sp.add_argument("--delta", type=int, default=1, help="k search half-width (default 1)")
    sp.add_argument("--calib", help="calibration JSON")
    sp.add_argument("--alpha", type=float, help="override the fitted carve fraction")
    sp.add_argument("--out", help="solution JSON")
    sp.add_argument("--layout", help="vertex,x,y,class CSV")
    sp.add_argument("--stable-output", action="store_true", help="zero timing fields")
    sp.add_argument("--debug-tree", action="store_true", help="include the winning tree's parent array")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep-k", help="subproblem statistics over a range of k")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--k-min", type=int, default=2)
    sp.add_argument("--k-max", type=int, default=10)
    common(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep_k)

    sp = sub.add_parser("sweep-budget", help="solve across budget fractions")
    sp.add_argument("--graph", required=True, nargs="+")
    sp.add_argument("--fractions", type=float, nargs="+", default=[0.05, 0.10, 0.15, 0.20])
    common(sp)
    sp.add_argument("--delta", type=int, default=1)
    sp.add_argument("--calib")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--random-trials", type=int, default=0,
                    help="also run the random-removal baseline with this many trials")
    sp.add_argument("--stable-output", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep_budget)

    sp = sub.add_parser("calibrate", help="fit the slope and alpha priors on a corpus")
    sp.add_argument("--graph", required=True, nargs="+")
    sp.add_argument("--k-min", type=int, default=2)
    sp.add_argument("--k-max", type=int, default=10)
    sp.add_argument("--alpha-step", type=int, default=2, help="region-size step of the alpha oracle")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--sweep-out", help="also write the k-sweep CSV")
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("baseline", help="random edge removal baseline")
    sp.add_argument("--graph", required=True)
    budget_args(sp)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stable-output", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("scaling", help="subproblem runtime vs |E|")
    sp.add_argument("--nodes", type=int, nargs="+", default=[200, 2000, 10000])
    sp.add_argument("--edges", type=int, nargs="+", default=[550, 5500, 29000])
    sp.add_argument("--gen-seed", type=int, default=1)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_scaling)

    sp = sub.add_parser("speedup", help="parallel speedup over worker counts")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--workers-list", type=int, nargs="+", default=[1, 2, 4])
    sp.add_argument("--k-min", type=int, default=2)
    sp.add_argument("--k-max", type=int, default=5)
    sp.add_argument("--samples", type=int, default=16)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_speedup)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "workers", 1) is None:
        args.workers = default_workers()
    log.info("kernel backend: %s", kernels.BACKEND)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - report and exit 1
        log.debug("failure", exc_info=True)
        print(f"dismantle {args.command}: error: {exc}", file=sys.stderr)
        return 1
    finally:
        shutdown_pools()
    return 0


def main():
    sys.exit(run())
