"""The compiled kernels and the pure-Python fallback must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dismantle import _pykernels, kernels
from dismantle._rng import seed_list
from dismantle.graph import Graph
from oracles import random_connected, rng

ck = pytest.importorskip("dismantle._ckernels")


def _graph(seed, n_max=40):
    r = rng(seed)
    n = r.randint(2, n_max)
    m = r.randint(n - 1, min(n * (n - 1) // 2, 3 * n))
    return Graph(n, random_connected(r, n, m)), r


def test_selected_backend_is_compiled():
    assert kernels.compiled()
    assert kernels.BACKEND == "cython"


def test_rng_streams_agree():
    for seed in (0, 1, 2**64 - 1, 123456789):
        assert np.array_equal(ck.rng_stream(seed, 64), _pykernels.rng_stream(seed, 64))
        for n in (1, 2, 3, 7, 1000, 2**31 + 11):
            assert np.array_equal(ck.rng_bounded_stream(seed, n, 64),
                                  _pykernels.rng_bounded_stream(seed, n, 64))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_wilson_and_partition_agree(seed):
    g, r = _graph(seed)
    s = r.getrandbits(64)
    pc = ck.wilson(g.indptr, g.nbr, g.nbr_eid, 0, s)
    pp = _pykernels.wilson(g.indptr, g.nbr, g.nbr_eid, 0, s)
    assert np.array_equal(pc[0], pp[0]) and np.array_equal(pc[1], pp[1])
    for a, b in zip(ck.tree_order(pc[0], 0), _pykernels.tree_order(pp[0], 0)):
        assert np.array_equal(a, b)
    k = r.randint(1, g.n)
    qc = ck.partition_tree(pc[0], pc[1], 0, k)
    qp = _pykernels.partition_tree(pp[0], pp[1], 0, k)
    assert np.array_equal(qc[0], qp[0]) and np.array_equal(qc[1], qp[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_trial_batch_agrees(seed):
    g, r = _graph(seed)
    k = r.randint(1, g.n)
    seeds = np.array(seed_list(seed, 8), dtype=np.uint64)
    c = ck.trial_batch(g.indptr, g.nbr, g.nbr_eid, g.eu, g.ev, 0, k, seeds)
    p = _pykernels.trial_batch(g.indptr, g.nbr, g.nbr_eid, g.eu, g.ev, 0, k, seeds)
    assert np.array_equal(c[0], p[0]) and np.array_equal(c[1], p[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_components_and_prune_agree(seed):
    g, r = _graph(seed)
    removed = np.array([r.random() < 0.3 for _ in range(g.m)], dtype=np.uint8)
    assert np.array_equal(ck.components(g.indptr, g.nbr, g.nbr_eid, removed),
                          _pykernels.components(g.indptr, g.nbr, g.nbr_eid, removed))
    target = r.randint(g.n - 1, g.m)
    s = r.getrandbits(64)
    assert np.array_equal(
        ck.prune_edges(g.indptr, g.nbr, g.nbr_eid, g.eu, g.ev, target, s),
        _pykernels.prune_edges(g.indptr, g.nbr, g.nbr_eid, g.eu, g.ev, target, s),
    )


def test_env_selects_fallback(tmp_path):
    import subprocess
    import sys

    code = "from dismantle import kernels; print(kernels.BACKEND)"
    env = {"DISMANTLE_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_benchmark_script_runs(tmp_path):
    import runpy

    mod = runpy.run_path(str(__import__("pathlib").Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    out = tmp_path / "b.csv"
    assert mod["main"](["--sizes", "60", "--samples", "2", "--repeats", "1", "--csv", str(out)]) == 0
    assert out.read_text().startswith("V,E,kernel,cython_ms,python_ms,ratio")
