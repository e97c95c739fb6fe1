import numpy as np
import pytest

from reusemagic import _kernels
from reusemagic.bench import qubit_sweep, replicate, term_sweep, workload, format_table, run_bench
from reusemagic.circuit import Measure
from reusemagic.gadgets import PI_4_STATE
from reusemagic.stabsum import exact_distribution, init

from conftest import max_dist_error


def test_workload_shape(rng):
    c = workload(10, rng)
    assert c.num_qubits == 11
    assert sum(isinstance(i, Measure) for i in c.instructions) == 8
    assert len(c) == 4 * 10 + 8
    assert workload(10, rng, measurements=0).num_bits == 0


def test_replication_keeps_the_state(rng):
    c = workload(4, rng, measurements=4)
    m = init(c, PI_4_STATE)
    r = replicate(m, 3)
    assert r.num_terms == 3 * m.num_terms
    assert max_dist_error(exact_distribution(r), exact_distribution(m)) <= 1e-12


def test_sweeps_report(rng):
    q = qubit_sweep((8, 16), repeats=1)
    assert [r["n"] for r in q["rows"]] == [8, 16] and np.isfinite(q["loglog_slope"])
    t = term_sweep(8, replicas=(1, 2), repeats=1)
    assert [r["terms"] for r in t["rows"]] == [6, 12]


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree(rng):
    c = workload(6, rng, measurements=6)
    m = init(c, PI_4_STATE)
    with _kernels.backend("numpy"):
        a = exact_distribution(m)
    with _kernels.backend("numba"):
        b = exact_distribution(m)
    assert max_dist_error(a, b) <= 1e-12


def test_table_format():
    rep = run_bench(ns=(8, 16), term_n=8, replicas=(1, 2), repeats=1)
    text = format_table(rep)
    assert "log-log slope" in text and "affine fit" in text
