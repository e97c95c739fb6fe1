"""Numba vs numpy measurement kernels, and the sampler end to end under each.

    python benchmarks/bench_kernels.py [--sizes 64 128 256] [--terms 36]
"""

import argparse
import time

import numpy as np

from reusemagic import _kernels
from reusemagic.bench import workload
from reusemagic.gadgets import PI_4_STATE
from reusemagic.stabsum import init, run_sample


def scrambled(n, terms, seed):
    """Stack of random-ish tableaus: |0...0> scrambled by the same 4n gates."""
    rng = np.random.default_rng(seed)
    c = workload(n - 1, rng, measurements=0)
    x, z, r = _kernels.zeros_tableau(n, (terms,))
    idx = np.arange(n)
    x[:, idx, idx] = 1
    z[:, n + idx, idx] = 1
    for g in c.instructions:
        _kernels.apply_gate(x, z, r, g.kind.value, g.targets)
    return x, z, r


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_measure(n, terms, kernels, seed=0):
    x0, z0, r0 = scrambled(n, terms, seed)

    def run():
        x, z, r = x0.copy(order="K"), z0.copy(order="K"), r0.copy()
        for q in range(0, n, max(1, n // 16)):
            kernels["peek_batch"](x, z, r, q)
            kernels["measure_batch"](x, z, r, q, 0, True)

    run()  # jit warm-up
    return best_of(run)


def bench_sampler(n, backend, seed=0):
    c = workload(n, np.random.default_rng(seed))
    m = init(c, PI_4_STATE)
    with _kernels.backend(backend):
        run_sample(m, seed=seed)
        return best_of(lambda: run_sample(m, seed=seed))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--terms", type=int, default=36)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable: only the numpy kernels can be timed")
    print(f"measurement kernels, {args.terms} stacked tableaus, 16 measurements each")
    print(f"{'n':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for n in args.sizes:
        t_np = bench_measure(n, args.terms, _kernels.NUMPY_KERNELS)
        t_nb = bench_measure(n, args.terms, _kernels.NUMBA_KERNELS) if _kernels.HAVE_NUMBA else float("nan")
        print(f"{n:6d} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}")
    print()
    print("run_sample, one-qubit ancilla (6 terms), 4n gates, 8 measurements")
    print(f"{'n':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for n in args.sizes:
        t_np = bench_sampler(n, "numpy")
        t_nb = bench_sampler(n, "numba") if _kernels.HAVE_NUMBA else float("nan")
        print(f"{n:6d} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
