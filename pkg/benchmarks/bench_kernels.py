"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 200 2000] [--samples 10] [--csv out.csv]

Both backends are imported directly, so the comparison does not depend on
which one ``dismantle.kernels`` selected.  Outputs are checked for equality
before anything is timed.
"""

import argparse
import csv
import sys

import numpy as np

from dismantle import _pykernels
from dismantle._rng import seed_list
from dismantle.bench import median_time
from dismantle.planar import GenSpec, generate, max_edges

try:
    from dismantle import _ckernels
except ImportError:
    _ckernels = None

EDGES_PER_NODE = 2.75


def cases(g, seeds, k):
    s = np.array(seeds, dtype=np.uint64)
    parent, pedge = _pykernels.wilson(g.indptr, g.nbr, g.nbr_eid, 0, int(s[0]))
    removed = np.zeros(g.m, dtype=np.uint8)
    removed[::3] = 1
    return {
        "wilson": lambda mod: mod.wilson(g.indptr, g.nbr, g.nbr_eid, 0, int(s[0])),
        "partition": lambda mod: mod.partition_tree(parent, pedge, 0, k),
        "components": lambda mod: mod.components(g.indptr, g.nbr, g.nbr_eid, removed),
        "trial_batch": lambda mod: mod.trial_batch(g.indptr, g.nbr, g.nbr_eid, g.eu, g.ev, 0, k, s),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 2000, 10000])
    ap.add_argument("--samples", type=int, default=10, help="trials in the trial_batch case")
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--csv", help="also write the table as CSV")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    print(f"{'V':>6} {'E':>6} {'kernel':<12} {'cython_ms':>10} {'python_ms':>10} {'ratio':>7}")
    for n in args.sizes:
        g = generate(GenSpec(n, min(int(EDGES_PER_NODE * n), max_edges(n)), seed=1))
        for name, fn in cases(g, seed_list(0, args.samples), args.k).items():
            if not same(fn(_ckernels), fn(_pykernels)):
                raise SystemExit(f"backends disagree on {name} at n={n}")
            tc = median_time(lambda: fn(_ckernels), args.repeats) * 1e3
            tp = median_time(lambda: fn(_pykernels), args.repeats) * 1e3
            rows.append([g.n, g.m, name, tc, tp, tp / tc])
            print(f"{g.n:>6} {g.m:>6} {name:<12} {tc:>10.3f} {tp:>10.3f} {tp / tc:>7.1f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["V", "E", "kernel", "cython_ms", "python_ms", "ratio"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
