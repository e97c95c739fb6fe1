"""End-to-end acceptance checks, one per headline property.

Each test prints a single ``PASS``/``FAIL`` line with the measured numbers.
Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import hashlib
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from reusemagic.bench import run_bench
from reusemagic.decomp import decompose, pauli_coefficients, reconstruct
from reusemagic.gadgets import PI_4_STATE, builtin, verify_gadget
from reusemagic.oracle import random_density, random_statevector
from reusemagic.search import survey
from reusemagic.tableau import FrameLabel

sys.path.insert(0, str(Path(__file__).parent))
from conftest import reduction_errors  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]


def report(request, label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line)
    assert ok, line


def test_reusable_s_gadget(request):
    t0 = time.perf_counter()
    r = verify_gadget(builtin("S_reusable"), n_random=100, seed=0)
    dt = time.perf_counter() - t0
    ok = (r.inputs_tested == 106 and r.unitary_match >= 1 - 1e-12 and r.ancilla_restored >= 1 - 1e-12
          and r.leakage <= 1e-12 and dt < 1.0)
    report(request, "reusable S gadget", ok,
           f"match={r.unitary_match:.15f} restored={r.ancilla_restored:.15f} leakage={r.leakage:.2e} "
           f"inputs={r.inputs_tested} time={dt:.3f}s")


def test_t_injection_branches(request):
    t0 = time.perf_counter()
    r = verify_gadget(builtin("T"), n_random=100, seed=0)
    dt = time.perf_counter() - t0
    fid = min(r.branch_fidelities.values())
    spread = max(max(abs(lo - 0.5), abs(hi - 0.5)) for lo, hi in r.branch_probability_range.values())
    ok = fid >= 1 - 1e-12 and spread <= 1e-12 and set(r.branch_fidelities) == {"0", "1"} and dt < 1.0
    report(request, "T injection branches", ok,
           f"min fidelity={fid:.15f} max |p-0.5|={spread:.2e} inputs={r.inputs_tested} time={dt:.3f}s")


def test_mixture_matches_oracle(request):
    t0 = time.perf_counter()
    errs = reduction_errors(200, seed=2024)
    dt = time.perf_counter() - t0
    ok = len(errs) == 200 and max(errs) <= 1e-9 and dt < 120
    report(request, "mixture simulator vs dense oracle", ok,
           f"cases={len(errs)} max error={max(errs):.2e} time={dt:.1f}s")


def test_clifford_survey(request):
    t0 = time.perf_counter()
    rep1 = survey(1)
    rep2 = survey(2)
    dt = time.perf_counter() - t0
    ok = (rep1["group_size"] == 24 and rep2["group_size"] == 11520 and rep2["non_clifford_count"] == 0
          and rep1["non_clifford_count"] == 0 and rep2["s_type_elements"] > 0 and rep2["s_composite"]["s_type"]
          and not rep2["inconclusive"] and dt < 600)
    report(request, "two-qubit Clifford survey", ok,
           f"sizes={rep1['group_size']}/{rep2['group_size']} solved={rep2['solved']} "
           f"non_clifford={rep2['non_clifford_count']} s_type={rep2['s_type_elements']} time={dt:.1f}s")


def test_scaling(request):
    rep = run_bench()
    slope = rep["qubit_sweep"]["loglog_slope"]
    dev = rep["term_sweep"]["max_relative_deviation"]
    ok = slope <= 2.5 and dev <= 0.2
    report(request, "sampler scaling", ok,
           f"backend={rep['backend']} log-log slope={slope:.3f} affine deviation={dev:.3f}")


def test_decomposition_round_trip(request):
    rng = np.random.default_rng(7)
    worst, worst_sum = 0.0, 0.0
    for k in range(1000):
        q = 1 + k % 3
        rho = random_density(q, rng) if k % 2 else random_statevector(q, rng)
        f = decompose(rho)
        target = rho if rho.ndim == 2 else np.outer(rho, rho.conj())
        worst = max(worst, np.abs(reconstruct(f) - target).max())
        worst = max(worst, np.abs(reconstruct(pauli_coefficients(rho)) - target).max())
        worst_sum = max(worst_sum, abs(f.total_weight - 1))
    f = decompose(PI_4_STATE)
    r2 = np.sqrt(2) / 4
    want = {FrameLabel.Z_PLUS: 0.5, FrameLabel.Z_MINUS: 0.5, FrameLabel.X_PLUS: r2, FrameLabel.X_MINUS: -r2,
            FrameLabel.Y_PLUS: r2, FrameLabel.Y_MINUS: -r2}
    coef = max(abs(f.weight_of(lab) - w) for lab, w in want.items())
    ok = worst <= 1e-12 and worst_sum <= 1e-12 and coef <= 1e-15 and len(f) == 6
    report(request, "decomposition round trip", ok,
           f"max error={worst:.2e} |sum-1|={worst_sum:.2e} pi/4 coefficient error={coef:.2e}")


def test_cli_determinism(request):
    cmd = [sys.executable, "-m", "reusemagic", "sample", str(ROOT / "circuits" / "t_rotation.txt"), "--seed", "42"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    digests = [hashlib.sha256(o).hexdigest()[:16] for o in outs]
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report(request, "CLI sampling determinism", ok, f"sha256 prefixes={digests[0]} {digests[1]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
