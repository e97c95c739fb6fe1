import numpy as np
import pytest

from reusemagic.circuit import Circuit, Measure, random_circuit
from reusemagic.oracle import basis_state, distribution, simulate_pure
from reusemagic.pauli import DimensionError, PauliString, gate
from reusemagic.stabsum import StabMixture, exact_distribution
from reusemagic.tableau import FrameLabel, Tableau, expectation_pauli, measure_z, new_tableau

from conftest import max_dist_error, tableau_distribution

P = PauliString.from_label


def stabilizer_set(t):
    return {str(s) for s in t.stabilizers}


def test_frame_products():
    assert stabilizer_set(new_tableau(["Z+"])) == {"+Z"}
    assert stabilizer_set(new_tableau(["X+", "Z+"])) == {"+XI", "+IZ"}
    t = new_tableau([FrameLabel.Y_MINUS])
    assert stabilizer_set(t) == {"-Y"}
    assert expectation_pauli(t, P("Y")) == -1
    with pytest.raises(ValueError):
        new_tableau([])


@pytest.mark.parametrize("label", list(FrameLabel))
def test_frame_label_measured_in_own_axis(label):
    t = new_tableau([label])
    basis = {"Z": [], "X": [gate("H", 0)], "Y": [gate("SDG", 0), gate("H", 0)]}[label.axis]
    for g in basis:
        t.apply_gate(g)
    assert t.measure_z(0) == (label.sign_bit, 1.0)


@pytest.mark.parametrize("label", list(FrameLabel))
def test_frame_label_matches_statevector(label):
    t = new_tableau([label])
    v = label.statevector()
    for p in ("X", "Y", "Z"):
        expect = np.vdot(v, P(p).to_matrix() @ v).real
        assert expectation_pauli(t, P(p)) == pytest.approx(expect, abs=1e-12)


def test_gate_examples():
    t = Tableau.zero_state(1).apply_gate(gate("H", 0))
    assert stabilizer_set(t) == {"+X"}
    t = Tableau.zero_state(2).apply_gate(gate("H", 0)).apply_gate(gate("CNOT", 0, 1))
    assert expectation_pauli(t, P("XX")) == 1 and expectation_pauli(t, P("ZZ")) == 1
    t = new_tableau(["X+"]).apply_gate(gate("S", 0))
    assert stabilizer_set(t) == {"+Y"}
    with pytest.raises(DimensionError):
        Tableau.zero_state(1).apply_gate(gate("H", 1))


def test_measurement_examples(rng):
    assert measure_z(Tableau.zero_state(1), 0) == (0, 1.0)
    t = new_tableau(["X+"])
    b, p = measure_z(t, 0, rng=rng)
    assert p == 0.5
    assert measure_z(t, 0, rng=rng) == (b, 1.0)
    for _ in range(20):
        t = Tableau.zero_state(2).apply_gate(gate("H", 0)).apply_gate(gate("CNOT", 0, 1))
        b0, _ = measure_z(t, 0, rng=rng)
        assert measure_z(t, 1, rng=rng) == (b0, 1.0)


def test_forced_measurement():
    t = new_tableau(["X+"])
    assert measure_z(t, 0, force=1) == (1, 0.5)
    assert measure_z(t, 0) == (1, 1.0)
    # forcing the impossible outcome signals probability 0 and leaves the state alone
    before = t.dump()
    assert measure_z(t, 0, force=0) == (0, 0.0)
    assert t.dump() == before


def test_expectation_examples():
    assert expectation_pauli(Tableau.zero_state(1), P("Z")) == 1
    assert expectation_pauli(Tableau.zero_state(1), P("X")) == 0
    bell = Tableau.zero_state(2).apply_gate(gate("H", 0)).apply_gate(gate("CNOT", 0, 1))
    assert expectation_pauli(bell, P("XX")) == 1
    assert expectation_pauli(bell, P("YY")) == -1


def test_dump_lists_destabilizers_then_stabilizers():
    assert Tableau.zero_state(2).dump().splitlines() == ["+XI", "+IX", "+ZI", "+IZ"]


def test_invariants_hold_after_random_gates(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        c = random_circuit(n, 40, rng, p_measure=0.0, p_conditional=0.0, p_reset=0.0)
        t = Tableau.zero_state(n)
        for g in c.instructions:
            t.apply_gate(g)
        assert t.check() == []
        for k in range(n):
            measure_z(t, k, rng=rng)
            assert t.check() == []


def test_check_detects_broken_tableau():
    t = Tableau.zero_state(2)
    t.z[2, 1] = 1  # stabilizer Z0 -> Z0 Z1 breaks the pairing with destabilizer X1
    assert t.check()


def test_measurement_is_reproducible_with_seed():
    def run(seed):
        rng = np.random.default_rng(seed)
        t = Tableau.zero_state(5)
        for q in range(5):
            t.apply_gate(gate("H", q))
        return [measure_z(t, q, rng=rng)[0] for q in range(5)]

    assert run(7) == run(7)


def test_matches_oracle_on_random_clifford_circuits(rng):
    """Branch enumeration over the tableau equals the dense distribution (200 circuits)."""
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        c = random_circuit(n, int(rng.integers(1, 41)), rng, max_measurements=8)
        worst = max(worst, max_dist_error(tableau_distribution(c), distribution(c)))
    assert worst <= 1e-9


def test_matches_oracle_on_stabilizer_inputs(rng):
    """Frame product inputs, not just |0...0>."""
    labels = list(FrameLabel)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        labs = [labels[i] for i in rng.integers(6, size=n)]
        c = random_circuit(n, 30, rng, max_measurements=0, p_measure=0.0, p_reset=0.0)
        c = Circuit(n, n, list(c.instructions) + [Measure(q, q) for q in range(n)])
        psi = np.ones(1, dtype=complex)
        for lab in labs:
            psi = np.kron(psi, lab.statevector())
        t = new_tableau(labs)
        m = StabMixture(np.ones(1), t.x[None].copy(order="K"), t.z[None].copy(order="K"), t.r[None].copy(), c, 0, ())
        assert max_dist_error(exact_distribution(m), distribution(c, psi)) <= 1e-9


def test_ghz_shot_is_all_equal():
    c = Circuit(3, 3, [gate("H", 0), gate("CNOT", 0, 1), gate("CNOT", 1, 2)] + [Measure(q, q) for q in range(3)])
    _, rec = simulate_pure(c, basis_state(3), seed=3)
    assert len(set(rec.values())) == 1
