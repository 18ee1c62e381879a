"""Self-calibration of the two empirical priors used by the dual-path solver.

* slope prior ``s(t) = c0 ln t + c1``: the extra crossing-edge cost of one
  more class, fitted from k-sweeps over a corpus of graphs;
* carve fraction ``alpha = B0 t^-gamma cut^beta1 f2^-beta2``: the share of
  vertices worth detaching with a budget below the bisection cost, fitted
  from an oracle sweep over region sizes.

No numeric defaults ship with the package; a model is always the product of
running :func:`calibrate` on some corpus.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .planar import density_feature
from .solver import (
    CalibrationDomainError,
    _argbest,
    baseline_bisection,
    detach_candidates,
    evaluate_trials,
    grow_subgraph,
)

DOMAIN_SLACK = 0.05
SWEEP_HEADER = ["graph", "V", "E", "t", "k", "F_mean", "F_std", "lcc_mean", "lcc_std", "seeds"]


class FitError(ValueError):
    pass


@dataclass
class CalibrationModel:
    c0: float
    c1: float
    B0: float
    gamma: float
    beta1: float
    beta2: float
    t_range: tuple
    r2_slope: float
    r2_alpha: float
    corpus: str = ""

    def __post_init__(self):
        lo, hi = (float(x) for x in self.t_range)
        if lo > hi:
            raise ValueError("t_range must satisfy t_min <= t_max")
        self.t_range = (lo, hi)

    def slope(self, t):
        return self.c0 * math.log(t) + self.c1

    def check_domain(self, t):
        lo, hi = self.t_range
        if not lo * (1 - DOMAIN_SLACK) <= t <= hi * (1 + DOMAIN_SLACK):
            raise CalibrationDomainError(
                f"t = {t:.4f} outside the calibrated range [{lo:.4f}, {hi:.4f}] "
                f"(+-{DOMAIN_SLACK:.0%} slack); recalibrate on a matching corpus"
            )

    def to_dict(self):
        d = asdict(self)
        d["t_range"] = list(self.t_range)
        return d

    @classmethod
    def from_dict(cls, d):
        fields = ("c0", "c1", "B0", "gamma", "beta1", "beta2", "t_range",
                  "r2_slope", "r2_alpha")
        missing = [f for f in fields if f not in d]
        if missing:
            raise ValueError(f"calibration file lacks {', '.join(missing)}")
        return cls(**{f: d[f] for f in fields}, corpus=d.get("corpus", ""))

    def dumps(self):
        # json writes floats with repr(): shortest round-tripping form
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())


@dataclass(frozen=True)
class SweepRecord:
    graph: str
    V: int
    E: int
    t: float
    k: int
    F_mean: float
    F_std: float
    lcc_mean: float
    lcc_std: float
    seeds: int
    F_best: int = 0
    lcc_best: int = 0


@dataclass(frozen=True)
class AlphaRecord:
    cut: int
    t: float
    f2: int
    alpha: float


def sweep_k(g, k_range, seeds, graph_id="g", workers=1):
    """One record per k: per-seed mean/std of |F| and LCC plus the selected trial."""
    k_min, k_max = k_range
    if not 2 <= k_min <= k_max <= g.n:
        raise ValueError(f"need 2 <= k_min <= k_max <= {g.n}")
    ks = list(range(k_min, k_max + 1))
    lcc, cuts = evaluate_trials(g, ks, seeds, workers)
    t = density_feature(g)
    out = []
    for i, k in enumerate(ks):
        best = _argbest(lcc[i], cuts[i])
        out.append(SweepRecord(
            graph=graph_id, V=g.n, E=g.m, t=t, k=k,
            F_mean=float(cuts[i].mean()), F_std=float(cuts[i].std()),
            lcc_mean=float(lcc[i].mean()), lcc_std=float(lcc[i].std()),
            seeds=len(seeds), F_best=int(cuts[i, best]), lcc_best=int(lcc[i, best]),
        ))
    return out


def sweep_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in records:
        w.writerow([r.graph, r.V, r.E, repr(r.t), r.k, repr(r.F_mean), repr(r.F_std),
                    repr(r.lcc_mean), repr(r.lcc_std), r.seeds])
    return buf.getvalue()


def _r2(y, yhat):
    y = np.asarray(y, dtype=float)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float(((y - np.asarray(yhat)) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def graph_slopes(records):
    """Per-graph slope of F_mean against (k - 2), anchored at the k = 2 mean."""
    by_graph = {}
    for r in records:
        by_graph.setdefault(r.graph, []).append(r)
    slopes = {}
    for gid, recs in by_graph.items():
        ks = {r.k for r in recs}
        if len(ks) < 3:
            raise FitError(f"graph {gid!r}: need >= 3 distinct k, got {sorted(ks)}")
        base = [r for r in recs if r.k == 2]
        if not base:
            raise FitError(f"graph {gid!r}: no k = 2 record to anchor the slope")
        f2 = base[0].F_mean
        x = np.array([r.k - 2 for r in recs], dtype=float)
        y = np.array([r.F_mean - f2 for r in recs])
        slopes[gid] = (float(x @ y / (x @ x)), recs[0].t, f2)
    return slopes


def fit_slope(records):
    """Fit ``s(t) = c0 ln t + c1``; returns ``(c0, c1, r2)``."""
    slopes = graph_slopes(records)
    ts = np.array([v[1] for v in slopes.values()])
    if len(np.unique(ts)) < 2:
        raise FitError("need records at >= 2 distinct t values")
    s = np.array([v[0] for v in slopes.values()])
    design = np.column_stack([np.log(ts), np.ones_like(ts)])
    (c0, c1), *_ = np.linalg.lstsq(design, s, rcond=None)
    y, yhat = [], []
    for r in records:
        _, t, f2 = slopes[r.graph]
        y.append(r.F_mean)
        yhat.append(f2 + (c0 * math.log(t) + c1) * (r.k - 2))
    return float(c0), float(c1), _r2(y, yhat)


def fit_alpha(records):
    """Log-linear least squares for ``(B0, gamma, beta1, beta2, r2)``."""
    if len(records) < 8:
        raise FitError(f"need >= 8 alpha records, got {len(records)}")
    cut = np.array([r.cut for r in records], dtype=float)
    t = np.array([r.t for r in records], dtype=float)
    f2 = np.array([r.f2 for r in records], dtype=float)
    alpha = np.array([r.alpha for r in records], dtype=float)
    if min(cut.min(), t.min(), f2.min(), alpha.min()) <= 0:
        raise FitError("alpha records must be strictly positive")
    design = np.column_stack([np.ones_like(t), -np.log(t), np.log(cut), -np.log(f2)])
    if np.linalg.matrix_rank(design) < 4:
        raise FitError("degenerate design: cut, t and f2 must each vary independently")
    y = np.log(alpha)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    log_b0, gamma, beta1, beta2 = (float(c) for c in coef)
    return math.exp(log_b0), gamma, beta1, beta2, _r2(y, design @ coef)


def alpha_oracle(g, seeds, cuts=None, step=2, workers=1, f2=None):
    """Best carve fraction per budget below the bisection cost.

    Regions of size 2, 2 + step, ... grown from the corner are each bisected;
    for every budget the region size whose detach candidates give the
    smallest residual LCC within budget wins (ties: smaller region).
    """
    n = g.n
    if f2 is None:
        f2 = baseline_bisection(g, seeds, workers).cut_count
    cuts = list(range(1, f2)) if cuts is None else list(cuts)
    if not cuts:
        return []
    t = density_feature(g)
    order = grow_subgraph(g, n)
    best = {c: None for c in cuts}
    for n_s in range(2, n, step):
        cands = detach_candidates(g, order[:n_s], seeds, workers)
        for c in cuts:
            fits = [x.lcc for x in cands if x.cut_count <= c]
            if fits and (best[c] is None or min(fits) < best[c][0]):
                best[c] = (min(fits), n_s)
    return [AlphaRecord(c, t, f2, best[c][1] / n) for c in cuts if best[c] is not None]


def calibrate(graphs, seeds, k_range=(2, 10), workers=1, alpha_step=2, corpus=""):
    """Fit a :class:`CalibrationModel` on ``graphs`` (a dict id -> Graph).

    Returns ``(model, sweep_records, alpha_records)``.
    """
    sweep, alpha_recs, ts = [], [], []
    for gid, g in graphs.items():
        k_hi = min(k_range[1], g.n)
        recs = sweep_k(g, (k_range[0], k_hi), seeds, gid, workers)
        sweep.extend(recs)
        ts.append(density_feature(g))
        f2 = next(r.F_best for r in recs if r.k == 2)
        alpha_recs.extend(alpha_oracle(g, seeds, step=alpha_step, workers=workers, f2=f2))
    c0, c1, r2s = fit_slope(sweep)
    b0, gamma, beta1, beta2, r2a = fit_alpha(alpha_recs)
    model = CalibrationModel(
        c0=c0, c1=c1, B0=b0, gamma=gamma, beta1=beta1, beta2=beta2,
        t_range=(min(ts), max(ts)), r2_slope=r2s, r2_alpha=r2a,
        corpus=corpus or f"{len(graphs)} graphs, k={k_range[0]}..{k_range[1]}, m={len(seeds)}",
    )
    return model, sweep, alpha_recs
