import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reusemagic.oracle import gate_matrix
from reusemagic.pauli import (
    CliffordGate,
    DimensionError,
    GateKind,
    PauliString,
    all_paulis,
    commutes,
    conjugate_by_circuit,
    conjugate_by_gate,
    gate,
    pauli_mul,
)

P = PauliString.from_label


def paulis(n):
    return st.builds(
        lambda x, z, k: PauliString(x, z, k),
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
        st.integers(0, 3),
    )


def test_label_round_trip():
    for label in ["+X", "-iZZ", "+iXZIY", "-IIII", "+Y"]:
        assert str(P(label)) == label
    assert P("XY") == P("+XY")


def test_bad_labels():
    for bad in ["", "+", "XQ", "i"]:
        with pytest.raises(ValueError):
            P(bad)


def test_identity_has_no_bits_or_phase():
    ident = PauliString.identity(3)
    assert not ident.x_bits.any() and not ident.z_bits.any()
    assert ident.phase_exponent == 0


def test_products():
    assert pauli_mul(P("X"), P("Y")) == P("+iZ")
    assert pauli_mul(P("Y"), P("X")) == P("-iZ")
    assert pauli_mul(P("XZ"), P("XX")) == P("+iIY")
    p = P("-iXYZ")
    assert pauli_mul(PauliString.identity(3), p) == p


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        pauli_mul(P("X"), P("XX"))
    with pytest.raises(DimensionError):
        commutes(P("X"), P("XX"))


def test_commutation_examples():
    assert not commutes(P("X"), P("Z"))
    assert commutes(P("XX"), P("ZZ"))
    assert commutes(P("XYZ"), PauliString.identity(3))


def test_conjugation_examples():
    assert conjugate_by_gate(gate("H", 0), P("X")) == P("Z")
    assert conjugate_by_gate(gate("S", 0), P("X")) == P("Y")
    assert conjugate_by_gate(gate("CNOT", 0, 1), P("XI")) == P("XX")


def test_gate_arity_checked():
    with pytest.raises(ValueError):
        gate("CNOT", 0)
    with pytest.raises(ValueError):
        gate("CNOT", 1, 1)
    with pytest.raises(ValueError):
        gate("H", 0, 1)
    with pytest.raises(DimensionError):
        conjugate_by_gate(gate("H", 3), P("XX"))


@pytest.mark.parametrize("kind", list(GateKind))
def test_conjugation_matches_dense_matrices(kind):
    """Every gate on every Pauli of its support: matrix of conj(g, p) == G P G^dag."""
    n = kind.arity
    g = CliffordGate(kind, tuple(range(n)))
    u = gate_matrix(kind)
    for p in all_paulis(n):
        for k in range(4):
            pk = p.with_phase(k)
            got = conjugate_by_gate(g, pk).to_matrix()
            np.testing.assert_allclose(got, u @ pk.to_matrix() @ u.conj().T, atol=1e-12)


@pytest.mark.parametrize("kind", list(GateKind))
def test_gate_then_inverse_is_identity(kind):
    n = kind.arity
    g = CliffordGate(kind, tuple(range(n)))
    for p in all_paulis(n):
        assert conjugate_by_circuit([g, g.inverse], p) == p
        assert conjugate_by_circuit([g.inverse, g], p) == p


def test_matrix_of_product_is_product_of_matrices():
    for a, b in itertools.product(all_paulis(2), repeat=2):
        np.testing.assert_allclose(pauli_mul(a, b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_reversed_product_differs_by_commutator_phase(pair):
    a, b = pair
    ab, ba = pauli_mul(a, b), pauli_mul(b, a)
    assert ab.unphased() == ba.unphased()
    assert (ab.phase_exponent - ba.phase_exponent) % 4 == (0 if commutes(a, b) else 2)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(2, 4).flatmap(
        lambda n: st.tuples(
            paulis(n),
            paulis(n),
            st.sampled_from(sorted(GateKind, key=lambda k: k.value)),
            st.permutations(range(n)),
        )
    )
)
def test_conjugation_is_an_automorphism(args):
    a, b, kind, perm = args
    g = CliffordGate(kind, tuple(perm[: kind.arity]))
    lhs = conjugate_by_gate(g, pauli_mul(a, b))
    rhs = pauli_mul(conjugate_by_gate(g, a), conjugate_by_gate(g, b))
    assert lhs == rhs
    assert commutes(conjugate_by_gate(g, a), conjugate_by_gate(g, b)) == commutes(a, b)


def test_values_are_immutable():
    p = P("XZ")
    with pytest.raises(ValueError):
        p.x_bits[0] = 0
