"""Phased Pauli strings and the fixed Clifford gate set."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from . import _kernels


class DimensionError(ValueError):
    """Operands act on different numbers of qubits, or an index is out of range."""


class GateKind(enum.Enum):
    H = "H"
    S = "S"
    S_DAG = "SDG"
    X = "X"
    Y = "Y"
    Z = "Z"
    CNOT = "CNOT"
    CZ = "CZ"
    SWAP = "SWAP"
    SQRT_X = "SX"
    SQRT_X_DAG = "SXDG"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def inverse(self) -> "GateKind":
        return _INVERSE.get(self, self)


_TWO_QUBIT = {GateKind.CNOT, GateKind.CZ, GateKind.SWAP}
_INVERSE = {
    GateKind.S: GateKind.S_DAG,
    GateKind.S_DAG: GateKind.S,
    GateKind.SQRT_X: GateKind.SQRT_X_DAG,
    GateKind.SQRT_X_DAG: GateKind.SQRT_X,
}
MNEMONICS = {k.value: k for k in GateKind}


@dataclass(frozen=True)
class CliffordGate:
    kind: GateKind
    targets: tuple[int, ...]

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, GateKind) else MNEMONICS[self.kind]
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != kind.arity:
            raise ValueError(f"{kind.value} takes {kind.arity} target(s), got {len(self.targets)}")
        if kind.arity == 2 and self.targets[0] == self.targets[1]:
            raise ValueError(f"{kind.value} targets must be distinct")
        if min(self.targets) < 0:
            raise ValueError("negative qubit index")

    @property
    def inverse(self) -> "CliffordGate":
        return CliffordGate(self.kind.inverse, self.targets)

    def __str__(self):
        return " ".join([self.kind.value, *map(str, self.targets)])


def gate(mnemonic: str, *targets: int) -> CliffordGate:
    """Shorthand: ``gate("CNOT", 0, 1)``."""
    return CliffordGate(MNEMONICS[mnemonic], targets)


_PHASE_PREFIX = ("+", "+i", "-", "-i")
_LETTERS = "IXZY"  # index = x + 2 z
_TEXT_RE = re.compile(r"^([+-]?)(i?)([IXYZ]+)$")


class PauliString:
    """``i**phase`` times a tensor product of I, X, Y, Z letters.

    Y is the Hermitian Pauli, so ``Y = i X Z``. Instances are immutable and
    hashable; the bit arrays are exposed read-only.
    """

    __slots__ = ("_x", "_z", "_phase")

    def __init__(self, x_bits, z_bits, phase_exponent: int = 0):
        x = np.array(x_bits, dtype=np.uint8).reshape(-1)
        z = np.array(z_bits, dtype=np.uint8).reshape(-1)
        if x.shape != z.shape or x.size == 0:
            raise DimensionError("x_bits and z_bits must have the same positive length")
        if np.any(x > 1) or np.any(z > 1):
            raise ValueError("bits must be 0 or 1")
        x.setflags(write=False)
        z.setflags(write=False)
        self._x = x
        self._z = z
        self._phase = int(phase_exponent) % 4

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls(np.zeros(num_qubits), np.zeros(num_qubits))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse ``"+iXZIY"``-style text. The sign prefix is optional."""
        m = _TEXT_RE.match(label.strip())
        if not m:
            raise ValueError(f"not a Pauli string: {label!r}")
        sign, imag, letters = m.groups()
        phase = (2 if sign == "-" else 0) + (1 if imag else 0)
        x = [c in "XY" for c in letters]
        z = [c in "ZY" for c in letters]
        return cls(x, z, phase)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str) -> "PauliString":
        """Single letter on one qubit, identity elsewhere."""
        x = np.zeros(num_qubits, dtype=np.uint8)
        z = np.zeros(num_qubits, dtype=np.uint8)
        x[qubit] = letter in "XY"
        z[qubit] = letter in "ZY"
        return cls(x, z)

    @property
    def num_qubits(self) -> int:
        return self._x.size

    @property
    def x_bits(self) -> np.ndarray:
        return self._x

    @property
    def z_bits(self) -> np.ndarray:
        return self._z

    @property
    def phase_exponent(self) -> int:
        return self._phase

    @property
    def letters(self) -> str:
        return "".join(_LETTERS[i] for i in (self._x + 2 * self._z))

    @property
    def is_hermitian(self) -> bool:
        return self._phase % 2 == 0

    def unphased(self) -> "PauliString":
        return PauliString(self._x, self._z, 0)

    def with_phase(self, phase_exponent: int) -> "PauliString":
        return PauliString(self._x, self._z, phase_exponent)

    def __str__(self):
        return _PHASE_PREFIX[self._phase] + self.letters

    def __repr__(self):
        return f"PauliString({str(self)!r})"

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self._phase == other._phase
            and np.array_equal(self._x, other._x)
            and np.array_equal(self._z, other._z)
        )

    def __hash__(self):
        return hash((self._phase, self._x.tobytes(), self._z.tobytes()))

    def __mul__(self, other):
        return pauli_mul(self, other)

    def __neg__(self):
        return self.with_phase(self._phase + 2)

    def to_matrix(self) -> np.ndarray:
        mats = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]),
                "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}
        out = np.ones((1, 1), dtype=complex)
        for c in self.letters:
            out = np.kron(out, mats[c])
        return (1j ** self._phase) * out


def _check_dims(a: PauliString, b: PauliString):
    if a.num_qubits != b.num_qubits:
        raise DimensionError(f"{a.num_qubits}-qubit vs {b.num_qubits}-qubit Pauli")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a * b`` with the accumulated power of i."""
    _check_dims(a, b)
    g = int(_kernels.g_phase(a.x_bits, a.z_bits, b.x_bits, b.z_bits).sum())
    return PauliString(a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits, a.phase_exponent + b.phase_exponent + g)


def symplectic_product(a: PauliString, b: PauliString) -> int:
    _check_dims(a, b)
    return int(np.sum((a.x_bits & b.z_bits) ^ (a.z_bits & b.x_bits)) % 2)


def commutes(a: PauliString, b: PauliString) -> bool:
    return symplectic_product(a, b) == 0


def conjugate_by_gate(g: CliffordGate, p: PauliString) -> PauliString:
    """Return ``g p g^dagger``."""
    if max(g.targets) >= p.num_qubits:
        raise DimensionError(f"gate {g} out of range for {p.num_qubits} qubit(s)")
    x = p.x_bits.copy()[None, :]
    z = p.z_bits.copy()[None, :]
    r = np.zeros(1, dtype=np.uint8)
    _kernels.apply_gate(x, z, r, g.kind.value, g.targets)
    return PauliString(x[0], z[0], p.phase_exponent + 2 * int(r[0]))


def conjugate_by_circuit(gates, p: PauliString) -> PauliString:
    for g in gates:
        p = conjugate_by_gate(g, p)
    return p


def all_paulis(num_qubits: int):
    """All 4**n phase-free strings, ordered with qubit 0 as the slowest letter (I, X, Y, Z)."""
    order = "IXYZ"
    for idx in range(4 ** num_qubits):
        digits = []
        for _ in range(num_qubits):
            digits.append(order[idx % 4])
            idx //= 4
        yield PauliString.from_label("".join(reversed(digits)))
