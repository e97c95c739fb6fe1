import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reusemagic.circuit import (
    Circuit,
    CircuitError,
    Conditional,
    GadgetResolutionError,
    Measure,
    NonClifford,
    Reset,
    expand_gadgets,
    parse,
    random_circuit,
    render,
    validate,
)
from reusemagic.gadgets import builtin, default_library
from reusemagic.oracle import distribution, random_statevector
from reusemagic.pauli import CliffordGate, gate

from conftest import max_dist_error


def test_parse_examples():
    c = parse("qubits 1\nH 0\nM 0 -> c0")
    assert c.num_qubits == 1 and len(c) == 2 and c.num_bits == 1
    c = parse("qubits 2\nT 0")
    assert c.instructions == (NonClifford("T", (0,)),)
    with pytest.raises(CircuitError, match="line 2"):
        parse("qubits 1\nCNOT 0 1")


def test_parse_full_grammar():
    text = """
    # comment line
    qubits 3
    bits 2
    H 0
    CNOT 0 1   # trailing comment
    M 1 -> c0
    IF c0 X 2
    GADGET S_reusable 2
    RESET 0
    SWAP 0 2
    """
    c = parse(text)
    assert c.num_qubits == 3 and c.num_bits == 2
    assert c.instructions == (
        gate("H", 0), gate("CNOT", 0, 1), Measure(1, 0), Conditional(0, gate("X", 2)),
        NonClifford("S_reusable", (2,)), Reset(0), gate("SWAP", 0, 2),
    )


@pytest.mark.parametrize("text, needle", [
    ("H 0", "qubits"),
    ("qubits 1\nFOO 0", "FOO"),
    ("qubits 2\nCNOT 0", "2 qubit"),
    ("qubits 1\nIF c0 X 0", "c0"),
    ("qubits 1\nM 0 -> c0\nM 0 -> c0", "c0"),
    ("qubits 1\nM 0 c0", "->"),
    ("qubits 0", "positive"),
    ("qubits 1\nbits 1\nM 0 -> c3", "c3"),
])
def test_parse_errors_carry_line_numbers(text, needle):
    with pytest.raises(CircuitError) as info:
        parse(text)
    assert info.value.line is not None
    assert needle in str(info.value)


def test_validate_examples():
    assert validate(Circuit(2, 1, [gate("H", 0), Measure(0, 0), Conditional(0, gate("X", 1))])) == []
    diags = validate(Circuit(1, 1, [Conditional(0, gate("X", 0)), Measure(0, 0)]))
    assert diags and "c0" in str(diags[0])
    assert validate(Circuit(1, 0, [])) == []


def test_validate_is_idempotent_and_never_raises():
    bad = Circuit(1, 1, [gate("CNOT", 0, 3), Measure(5, 2), Conditional(0, gate("X", 0))])
    d1, d2 = validate(bad), validate(bad)
    assert d1 == d2 and len(d1) >= 3


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_render_parse_round_trip(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(int(rng.integers(1, 6)), int(rng.integers(0, 30)), rng)
    assert parse(render(c)) == c


def test_render_round_trip_with_nonclifford():
    c = Circuit(2, 1, [NonClifford("T", (0,)), NonClifford("S_reusable", (1,)), Measure(0, 0)])
    assert parse(render(c)) == c


def test_expand_three_reusable_s_share_one_ancilla():
    c = parse("qubits 2\nGADGET S_reusable 0\nGADGET S_reusable 1\nGADGET S_reusable 0")
    ex, anc = expand_gadgets(c)
    body = builtin("S_reusable").body.instructions
    assert ex.num_qubits == 3
    assert ex.is_clifford and len(ex) == 3 * len(body)
    assert len(anc) == 1 and anc[0].qubits == (2,) and anc[0].reusable


def test_expand_two_t_gates_use_fresh_ancillas():
    c = parse("qubits 1\nT 0\nT 0")
    ex, anc = expand_gadgets(c)
    assert ex.num_qubits == 3 and ex.num_bits == 2
    assert [a.qubits for a in anc] == [(1,), (2,)]
    assert not any(a.reusable for a in anc)
    meas = [i for i in ex.instructions if isinstance(i, Measure)]
    conds = [i for i in ex.instructions if isinstance(i, Conditional)]
    assert [m.qubit for m in meas] == [1, 2]
    assert [cd.gate for cd in conds] == [gate("S", 0), gate("S", 0)]


def test_expand_clifford_circuit_is_identity():
    c = parse("qubits 2\nH 0\nCNOT 0 1")
    ex, anc = expand_gadgets(c)
    assert ex is c and anc == []


def test_expand_unknown_gadget():
    with pytest.raises(GadgetResolutionError):
        expand_gadgets(parse("qubits 1\nGADGET nope 0"))


def test_expansion_preserves_distributions(rng):
    """Expanded circuit with ancillas traced out == original with claimed unitaries."""
    lib = default_library()
    unitaries = {name: g.claimed_unitary for name, g in lib.items()}
    names = ["T", "S_reusable", "SqrtX_reusable", "SqrtY_reusable"]
    worst = 0.0
    for _ in range(40):
        n = int(rng.integers(1, 4))
        base = random_circuit(n, 15, rng, max_measurements=3)
        insts = list(base.instructions)
        for _ in range(int(rng.integers(1, 3))):
            pos = int(rng.integers(len(insts) + 1))
            insts.insert(pos, NonClifford(names[rng.integers(len(names))], (int(rng.integers(n)),)))
        c = Circuit(n, base.num_bits, insts)
        if c.num_qubits + sum(1 for i in insts if isinstance(i, NonClifford)) > 6:
            continue
        psi = random_statevector(n, rng)
        ref = distribution(c, psi, unitaries=unitaries)
        ex, anc = expand_gadgets(c, lib)
        full = psi
        for reg in anc:
            full = np.kron(full, reg.state)
        got = distribution(ex, full)
        # marginalize the gadget bits
        marg = {}
        for k, p in got.items():
            marg[k[: c.num_bits]] = marg.get(k[: c.num_bits], 0.0) + p
        worst = max(worst, max_dist_error(marg, ref))
    assert worst <= 1e-9


def test_expanded_gates_are_clifford_instances(rng):
    c = parse("qubits 2\nT 0\nGADGET SqrtY_reusable 1\nT 1")
    ex, _ = expand_gadgets(c)
    assert all(isinstance(i, (CliffordGate, Measure, Conditional, Reset)) for i in ex.instructions)
    assert validate(ex) == []
