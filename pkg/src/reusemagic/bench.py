"""Wall-time scaling of the stabilizer-mixture sampler.

Two sweeps back the cost model ``(live terms) x poly(n)``:

* qubit sweep: one ancilla qubit (6 frame terms), ``n`` data qubits, ``4n``
  random Clifford gates and a fixed number of measurements, for each ``n``;
  reported with the log-log slope of time against ``n``.
* term sweep: ``n`` fixed, the same one-qubit ancilla mixture replicated
  ``r`` times with weights divided by ``r`` (the same density matrix, ``6r``
  live terms); reported with an affine fit of time against term count.
"""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np

from . import _kernels
from .circuit import Circuit, Measure, _random_gate
from .gadgets import PI_4_STATE
from .stabsum import StabMixture, init, run_sample

QUBIT_SWEEP = (64, 128, 256, 512)
REPLICAS = (4, 8, 16, 32, 64)
MEASUREMENTS = 8


def workload(n_data: int, rng, gates_per_qubit: int = 4, measurements: int = MEASUREMENTS) -> Circuit:
    """Random Clifford circuit on ``n_data + 1`` qubits (ancilla last) with evenly spaced measurements."""
    n = n_data + 1
    depth = gates_per_qubit * n_data
    marks = set(np.linspace(depth // max(measurements, 1), depth, measurements, dtype=int).tolist())
    insts = []
    bit = 0
    for k in range(1, depth + 1):
        insts.append(_random_gate(n, rng))
        if k in marks:
            insts.append(Measure(int(rng.integers(n)), bit))
            bit += 1
    return Circuit(n, bit, insts)


def replicate(m: StabMixture, copies: int) -> StabMixture:
    """The same state written with ``copies`` times as many terms."""
    def tile(a):
        return _kernels.as_column_major(np.tile(a, (copies, 1, 1)))

    return StabMixture(np.tile(m.weights, copies) / copies, tile(m.x), tile(m.z), np.tile(m.r, (copies, 1)),
                       m.circuit, m.num_ancilla_qubits, m.placement)


def _time(m: StabMixture, repeats: int, seed: int) -> float:
    best = float("inf")
    for k in range(repeats):
        t0 = time.perf_counter()
        run_sample(m, seed=seed + k)
        best = min(best, time.perf_counter() - t0)
    return best


def qubit_sweep(ns: Sequence[int] = QUBIT_SWEEP, repeats: int = 5, seed: int = 0) -> dict:
    rows = []
    for n in ns:
        rng = np.random.default_rng([seed, n])
        c = workload(n, rng)
        m = init(c, PI_4_STATE)
        run_sample(m, seed=seed)  # warm-up (jit compilation, caches)
        rows.append({"n": n, "terms": m.num_terms, "gates": len(c), "seconds": _time(m, repeats, seed)})
    x = np.log([r["n"] for r in rows])
    y = np.log([r["seconds"] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0]) if len(rows) > 1 else float("nan")
    return {"rows": rows, "loglog_slope": slope}


def term_sweep(n: int = 128, replicas: Sequence[int] = REPLICAS, repeats: int = 5, seed: int = 0) -> dict:
    rng = np.random.default_rng([seed, n, 1])
    c = workload(n, rng)
    base = init(c, PI_4_STATE)
    run_sample(base, seed=seed)
    rows = []
    for r in replicas:
        m = replicate(base, r)
        rows.append({"terms": m.num_terms, "seconds": _time(m, repeats, seed)})
    k = np.array([r["terms"] for r in rows], dtype=float)
    t = np.array([r["seconds"] for r in rows])
    slope, icpt = np.polyfit(k, t, 1)
    rel = np.abs(slope * k + icpt - t) / t
    return {"n": n, "rows": rows, "fit": {"seconds_per_term": float(slope), "intercept": float(icpt)},
            "max_relative_deviation": float(rel.max())}


def run_bench(ns: Sequence[int] = QUBIT_SWEEP, term_n: int = 128, replicas: Sequence[int] = REPLICAS,
              repeats: int = 5, seed: int = 0) -> dict:
    return {
        "schema": 1,
        "backend": _kernels.BACKEND,
        "seed": seed,
        "qubit_sweep": qubit_sweep(ns, repeats, seed),
        "term_sweep": term_sweep(term_n, replicas, repeats, seed),
    }


def format_table(report: dict) -> str:
    lines = [f"backend: {report['backend']}", "", "    n   terms   gates   seconds"]
    for r in report["qubit_sweep"]["rows"]:
        lines.append(f"{r['n']:5d} {r['terms']:7d} {r['gates']:7d} {r['seconds']:9.4f}")
    lines.append(f"log-log slope: {report['qubit_sweep']['loglog_slope']:.3f}")
    ts = report["term_sweep"]
    lines += ["", f"n = {ts['n']}", "terms   seconds"]
    for r in ts["rows"]:
        lines.append(f"{r['terms']:5d} {r['seconds']:9.4f}")
    lines.append(f"affine fit max relative deviation: {ts['max_relative_deviation']:.3f}")
    return "\n".join(lines)
