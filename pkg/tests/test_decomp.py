import json

import numpy as np
import pytest

from reusemagic.decomp import (
    PauliDecomposition,
    decompose,
    from_json,
    pauli_coefficients,
    reconstruct,
    stabilizer_frame,
    to_json,
)
from reusemagic.gadgets import PI_4_STATE
from reusemagic.oracle import random_density, random_statevector
from reusemagic.tableau import FrameLabel

R2 = np.sqrt(2) / 4


def test_pauli_examples():
    zero = np.diag([1.0, 0.0])
    assert pauli_coefficients(zero).nonzero() == pytest.approx({"I": 0.5, "Z": 0.5})
    assert pauli_coefficients(np.eye(2) / 2).nonzero() == pytest.approx({"I": 0.5})
    c = pauli_coefficients(PI_4_STATE)
    for label, v in {"I": 0.5, "X": R2, "Y": R2, "Z": 0.0}.items():
        assert c[label] == pytest.approx(v, abs=1e-15)


def test_frame_examples():
    f = decompose(np.diag([1.0, 0.0]))
    assert f.terms == ((1.0, (FrameLabel.Z_PLUS,)),)
    f = decompose(np.eye(2) / 2)
    assert [(w, labs) for w, labs in f.terms] == [(0.5, (FrameLabel.Z_PLUS,)), (0.5, (FrameLabel.Z_MINUS,))]


def test_pi4_frame_weights():
    # I = Z+ + Z- carries 1/2 to each of Z+ and Z-; Z has coefficient 0
    f = decompose(PI_4_STATE)
    expected = {"Z+": 0.5, "Z-": 0.5, "X+": R2, "X-": -R2, "Y+": R2, "Y-": -R2}
    assert len(f) == 6
    for lab, w in expected.items():
        assert f.weight_of(lab) == pytest.approx(w, abs=1e-15)
    assert f.total_weight == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(reconstruct(f), np.outer(PI_4_STATE, PI_4_STATE.conj()), atol=1e-15)


def test_zero_state_round_trip():
    rho = np.diag([1.0, 0.0]).astype(complex)
    assert np.max(np.abs(reconstruct(decompose(rho)) - rho)) <= 1e-14
    assert np.max(np.abs(reconstruct(pauli_coefficients(rho)) - rho)) <= 1e-14


@pytest.mark.parametrize("q", [1, 2, 3])
def test_round_trips(rng, q):
    for _ in range(60):
        rho = random_density(q, rng) if rng.random() < 0.5 else random_statevector(q, rng)
        dense = rho if rho.ndim == 2 else np.outer(rho, rho.conj())
        pc = pauli_coefficients(rho)
        assert pc[("I" * q)] == pytest.approx(1 / 2 ** q, abs=1e-15)
        assert np.max(np.abs(reconstruct(pc) - dense)) <= 1e-12
        f = stabilizer_frame(pc)
        assert np.max(np.abs(reconstruct(f) - dense)) <= 1e-12
        assert f.total_weight == pytest.approx(1, abs=1e-12)
        assert len(f) <= 6 ** q


def test_single_qubit_coefficients_match_amplitude_formulas(rng):
    for _ in range(200):
        a, b = random_statevector(1, rng)
        c = pauli_coefficients(np.array([a, b]))
        a_plus = (abs(a) ** 2 + abs(b) ** 2) / 2
        a_minus = (abs(a) ** 2 - abs(b) ** 2) / 2
        b_plus = (a * np.conj(b) + np.conj(a) * b) / 2
        b_minus = (a * np.conj(b) - np.conj(a) * b) / 2
        assert c["I"] == pytest.approx(a_plus, abs=1e-14)
        assert c["Z"] == pytest.approx(a_minus, abs=1e-14)
        assert c["X"] == pytest.approx(b_plus.real, abs=1e-14)
        # with Y = [[0, -i], [i, 0]] the trace formula gives +i b_minus
        assert c["Y"] == pytest.approx((1j * b_minus).real, abs=1e-14)


def test_rejects_invalid_input():
    with pytest.raises(ValueError):
        pauli_coefficients(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        pauli_coefficients(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        pauli_coefficients(np.eye(16) / 16)


def test_json_round_trip(rng):
    rho = random_density(2, rng)
    pc = pauli_coefficients(rho)
    back = from_json(to_json(pc))
    assert isinstance(back, PauliDecomposition)
    np.testing.assert_allclose(reconstruct(back), reconstruct(pc), atol=1e-15)
    f = stabilizer_frame(pc)
    text = to_json(f)
    assert json.loads(text)["kind"] == "frame"
    assert {lab for t in json.loads(text)["terms"] for lab in t["labels"]} <= {lab.value for lab in FrameLabel}
    np.testing.assert_allclose(reconstruct(from_json(text)), reconstruct(f), atol=1e-15)


def test_pruning_drops_tiny_weights():
    f = decompose(np.diag([1.0, 0.0]) + 0j)
    assert all(abs(w) >= 1e-13 for w, _ in f.terms)
