"""Stabilizer tableau with destabilizers (Aaronson-Gottesman layout)."""

from __future__ import annotations

import enum
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .pauli import CliffordGate, DimensionError, PauliString, pauli_mul


class FrameLabel(enum.Enum):
    """The six single-qubit stabilizer states."""

    Z_PLUS = "Z+"
    Z_MINUS = "Z-"
    X_PLUS = "X+"
    X_MINUS = "X-"
    Y_PLUS = "Y+"
    Y_MINUS = "Y-"

    @property
    def axis(self) -> str:
        return self.value[0]

    @property
    def sign_bit(self) -> int:
        return int(self.value[1] == "-")

    def statevector(self) -> np.ndarray:
        s = 1 / np.sqrt(2)
        return {
            "Z+": np.array([1, 0], dtype=complex),
            "Z-": np.array([0, 1], dtype=complex),
            "X+": np.array([s, s], dtype=complex),
            "X-": np.array([s, -s], dtype=complex),
            "Y+": np.array([s, 1j * s], dtype=complex),
            "Y-": np.array([s, -1j * s], dtype=complex),
        }[self.value]

    def projector(self) -> np.ndarray:
        v = self.statevector()
        return np.outer(v, v.conj())


def as_label(value) -> FrameLabel:
    return value if isinstance(value, FrameLabel) else FrameLabel(value)


class Tableau:
    """Stabilizer state of ``n`` qubits stored as ``2n`` generator rows.

    Rows ``0..n-1`` are destabilizers and rows ``n..2n-1`` stabilizers. The
    arrays may be views into a larger stack (see :mod:`reusemagic.stabsum`).
    """

    __slots__ = ("x", "z", "r")

    def __init__(self, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.x = x
        self.z = z
        self.r = r

    @classmethod
    def zero_state(cls, num_qubits: int) -> "Tableau":
        return new_tableau([FrameLabel.Z_PLUS] * num_qubits)

    @property
    def num_qubits(self) -> int:
        return self.x.shape[1]

    def copy(self) -> "Tableau":
        return Tableau(self.x.copy(order="K"), self.z.copy(order="K"), self.r.copy())

    def row(self, i: int) -> PauliString:
        return PauliString(self.x[i], self.z[i], 2 * int(self.r[i]))

    @property
    def destabilizers(self) -> list[PauliString]:
        return [self.row(i) for i in range(self.num_qubits)]

    @property
    def stabilizers(self) -> list[PauliString]:
        n = self.num_qubits
        return [self.row(n + i) for i in range(n)]

    def apply_gate(self, g: CliffordGate) -> "Tableau":
        if max(g.targets) >= self.num_qubits:
            raise DimensionError(f"gate {g} out of range for {self.num_qubits} qubit(s)")
        _kernels.apply_gate(self.x, self.z, self.r, g.kind.value, g.targets)
        return self

    def measure_z(self, qubit: int, force: Optional[int] = None, rng=None) -> tuple[int, float]:
        return measure_z(self, qubit, force=force, rng=rng)

    def expectation(self, p: PauliString) -> int:
        return expectation_pauli(self, p)

    def check(self) -> list[str]:
        """Return a list of broken invariants (empty when the tableau is valid)."""
        n = self.num_qubits
        problems = []
        if self.x.shape != (2 * n, n) or self.z.shape != (2 * n, n) or self.r.shape != (2 * n,):
            return [f"bad array shapes {self.x.shape}, {self.z.shape}, {self.r.shape}"]
        x = self.x.astype(np.int64)
        z = self.z.astype(np.int64)
        sym = (x @ z.T + z @ x.T) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        idx = np.arange(n)
        expected[idx, n + idx] = 1
        expected[n + idx, idx] = 1
        bad = np.argwhere(sym != expected)
        for i, j in bad[:10]:
            if i < j:
                problems.append(f"rows {i} and {j}: commutation {sym[i, j]}, expected {expected[i, j]}")
        if np.any(self.r > 1):
            problems.append("sign bits outside {0, 1}")
        return problems

    def dump(self) -> str:
        """Destabilizers then stabilizers, one Pauli string per line."""
        return "\n".join(str(self.row(i)) for i in range(2 * self.num_qubits))

    def __repr__(self):
        return f"Tableau(n={self.num_qubits}, stabilizers={[str(s) for s in self.stabilizers]})"


def new_tableau(labels: Sequence) -> Tableau:
    """Product state with one frame label per qubit."""
    labels = [as_label(v) for v in labels]
    if not labels:
        raise ValueError("need at least one qubit")
    n = len(labels)
    x, z, r = _kernels.zeros_tableau(n)
    write_frame_rows(x, z, r, labels, range(n))
    return Tableau(x, z, r)


def write_frame_rows(x, z, r, labels, qubits):
    """Set the generator pair of each listed qubit to its frame state, in place."""
    n = x.shape[-1]
    for q, lab in zip(qubits, labels):
        lab = as_label(lab)
        d, s = q, n + q
        x[..., d, :] = 0
        z[..., d, :] = 0
        x[..., s, :] = 0
        z[..., s, :] = 0
        if lab.axis == "Z":
            x[..., d, q] = 1
            z[..., s, q] = 1
        else:
            z[..., d, q] = 1
            x[..., s, q] = 1
            if lab.axis == "Y":
                z[..., s, q] = 1
        r[..., d] = 0
        r[..., s] = lab.sign_bit


def apply_gate(t: Tableau, g: CliffordGate) -> Tableau:
    return t.apply_gate(g)


def measure_z(t: Tableau, qubit: int, force: Optional[int] = None, rng=None) -> tuple[int, float]:
    """Measure ``Z_qubit``.

    Returns ``(outcome, probability_of_outcome)`` with the probability in
    {0, 1/2, 1}. With ``force`` set the outcome is fixed instead of sampled;
    a forced outcome of probability 0 leaves ``t`` untouched and reports 0.0
    so the caller can drop the branch.
    """
    if not 0 <= qubit < t.num_qubits:
        raise DimensionError(f"qubit {qubit} out of range")
    if force is None:
        rng = np.random.default_rng() if rng is None else rng
        bit, forced = int(rng.integers(2)), False
    else:
        bit, forced = int(force), True
    outcome, code = _kernels.measure(t.x, t.z, t.r, qubit, bit, forced)
    return int(outcome), _kernels.PROB_VALUES[int(code)]


def expectation_pauli(t: Tableau, p: PauliString) -> int:
    """``Tr(P rho)`` for a Hermitian Pauli ``P``: +1, -1 or 0."""
    n = t.num_qubits
    if p.num_qubits != n:
        raise DimensionError(f"{p.num_qubits}-qubit Pauli on {n}-qubit tableau")
    if not p.is_hermitian:
        raise ValueError("expectation needs a Hermitian Pauli (phase exponent 0 or 2)")
    anti = ((t.x & p.z_bits) ^ (t.z & p.x_bits)).sum(axis=1) % 2
    if np.any(anti[n:]):
        return 0
    acc = PauliString.identity(n)
    for i in np.flatnonzero(anti[:n]):
        acc = pauli_mul(acc, t.row(n + int(i)))
    if not (np.array_equal(acc.x_bits, p.x_bits) and np.array_equal(acc.z_bits, p.z_bits)):
        raise AssertionError("corrupt tableau: commuting Pauli not in the stabilizer group")
    return 1 if acc.phase_exponent == p.phase_exponent else -1
