import numpy as np
import pytest

from reusemagic.circuit import Circuit
from reusemagic.stabsum import exact_distribution, init


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def max_dist_error(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys), default=0.0)


def tableau_distribution(c: Circuit, rho_ancilla=None, placement=None) -> dict:
    return exact_distribution(init(c, rho_ancilla, placement))


def reduction_case(rng):
    """Random circuit on data + ancilla with a random valid ancilla density matrix.

    Returns (circuit, rho, placement); at most 5 data qubits, 2 ancilla
    qubits, 40 instructions and 8 measurements (resets included).
    """
    from reusemagic.circuit import random_circuit
    from reusemagic.oracle import random_density

    n_data = int(rng.integers(1, 6))
    q = int(rng.integers(1, 3))
    n = n_data + q
    c = random_circuit(n, int(rng.integers(1, 41)), rng, max_measurements=8)
    rank = int(rng.integers(1, 2 ** q + 1))
    rho = random_density(q, rng, rank=rank)
    placement = [int(v) for v in rng.choice(n, size=q, replace=False)]
    return c, rho, placement


def reduction_errors(count, seed):
    from reusemagic.oracle import distribution

    rng = np.random.default_rng(seed)
    errs = []
    for _ in range(count):
        c, rho, placement = reduction_case(rng)
        got = tableau_distribution(c, rho, placement)
        ref = distribution(c, rho_ancilla=rho, placement=placement)
        errs.append(max_dist_error(got, ref))
    return errs
