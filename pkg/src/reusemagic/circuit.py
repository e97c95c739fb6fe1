"""Circuit IR, the line-oriented text format, and gadget expansion.

Text grammar, one statement per line::

    qubits N
    bits N                 (optional; inferred from the highest bit used)
    GATE q [q]             GATE in H S SDG X Y Z SX SXDG CNOT CZ SWAP
    T q
    GADGET name q [q ...]  any other non-Clifford gate, resolved at expansion
    M q -> cK
    IF cK GATE q [q]
    RESET q
    # comment
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .pauli import MNEMONICS, CliffordGate


@dataclass(frozen=True)
class NonClifford:
    name: str
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))


@dataclass(frozen=True)
class Measure:
    qubit: int
    bit: int


@dataclass(frozen=True)
class Conditional:
    bit: int
    gate: CliffordGate


@dataclass(frozen=True)
class Reset:
    qubit: int


Instruction = Union[CliffordGate, NonClifford, Measure, Conditional, Reset]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_bits: int = 0
    instructions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    @property
    def is_clifford(self) -> bool:
        return not any(isinstance(i, NonClifford) for i in self.instructions)

    @property
    def measurement_count(self) -> int:
        return sum(isinstance(i, (Measure, Reset)) for i in self.instructions)

    @property
    def written_bits(self) -> list[int]:
        return [i.bit for i in self.instructions if isinstance(i, Measure)]

    def render(self) -> str:
        return render(self)

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Diagnostic:
    index: int  # instruction index, -1 for header problems
    message: str

    def __str__(self):
        return self.message if self.index < 0 else f"instruction {self.index}: {self.message}"


class CircuitError(ValueError):
    """Malformed circuit text or an invalid circuit."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GadgetResolutionError(KeyError):
    pass


# -- validation -------------------------------------------------------------


def _touched_qubits(inst) -> tuple[int, ...]:
    if isinstance(inst, (CliffordGate, NonClifford)):
        return inst.targets
    if isinstance(inst, Conditional):
        return inst.gate.targets
    return (inst.qubit,)


def validate(c: Circuit) -> list[Diagnostic]:
    """Re-check every circuit invariant. Never raises; an empty list means ok."""
    out = []
    if c.num_qubits < 1:
        out.append(Diagnostic(-1, f"qubit count must be positive, got {c.num_qubits}"))
    if c.num_bits < 0:
        out.append(Diagnostic(-1, f"bit count must be nonnegative, got {c.num_bits}"))
    written = set()
    for k, inst in enumerate(c.instructions):
        if not isinstance(inst, (CliffordGate, NonClifford, Measure, Conditional, Reset)):
            out.append(Diagnostic(k, f"unknown instruction {inst!r}"))
            continue
        for q in _touched_qubits(inst):
            if not 0 <= q < c.num_qubits:
                out.append(Diagnostic(k, f"qubit index {q} out of range (qubits {c.num_qubits})"))
        if isinstance(inst, NonClifford) and len(set(inst.targets)) != len(inst.targets):
            out.append(Diagnostic(k, f"repeated target in {inst.name}"))
        if isinstance(inst, Measure):
            if not 0 <= inst.bit < c.num_bits:
                out.append(Diagnostic(k, f"bit c{inst.bit} out of range (bits {c.num_bits})"))
            if inst.bit in written:
                out.append(Diagnostic(k, f"bit c{inst.bit} written twice"))
            written.add(inst.bit)
        elif isinstance(inst, Conditional):
            if inst.bit not in written:
                out.append(Diagnostic(k, f"conditional reads bit c{inst.bit} before any measurement writes it"))
    return out


# -- text format ------------------------------------------------------------

_BIT_RE = re.compile(r"^c(\d+)$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _int(tok: str, what: str, line: int) -> int:
    if not tok.isdigit():
        raise CircuitError(f"expected {what}, got {tok!r}", line)
    return int(tok)


def _bit(tok: str, line: int) -> int:
    m = _BIT_RE.match(tok)
    if not m:
        raise CircuitError(f"expected classical bit cN, got {tok!r}", line)
    return int(m.group(1))


def _gate(tokens: Sequence[str], line: int) -> CliffordGate:
    kind = MNEMONICS.get(tokens[0])
    if kind is None:
        raise CircuitError(f"unknown mnemonic {tokens[0]!r}", line)
    if len(tokens) - 1 != kind.arity:
        raise CircuitError(f"{tokens[0]} takes {kind.arity} qubit(s), got {len(tokens) - 1}", line)
    targets = [_int(t, "qubit index", line) for t in tokens[1:]]
    try:
        return CliffordGate(kind, targets)
    except ValueError as exc:
        raise CircuitError(str(exc), line) from None


def parse(text: str) -> Circuit:
    """Parse circuit text; raises :class:`CircuitError` naming the line."""
    num_qubits = None
    num_bits = None
    header_line = None
    insts = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tok = body.split()
        head = tok[0]
        if head == "qubits":
            if len(tok) != 2:
                raise CircuitError("usage: qubits N", lineno)
            if num_qubits is not None or insts:
                raise CircuitError("'qubits' must appear once, before any instruction", lineno)
            num_qubits = _int(tok[1], "qubit count", lineno)
            header_line = lineno
            continue
        if head == "bits":
            if len(tok) != 2:
                raise CircuitError("usage: bits N", lineno)
            if num_bits is not None or insts:
                raise CircuitError("'bits' must appear once, before any instruction", lineno)
            num_bits = _int(tok[1], "bit count", lineno)
            continue
        if num_qubits is None:
            raise CircuitError("missing 'qubits N' header", lineno)
        if head == "T":
            if len(tok) != 2:
                raise CircuitError("T takes 1 qubit", lineno)
            inst = NonClifford("T", (_int(tok[1], "qubit index", lineno),))
        elif head == "GADGET":
            if len(tok) < 3 or not _NAME_RE.match(tok[1]):
                raise CircuitError("usage: GADGET name q [q ...]", lineno)
            inst = NonClifford(tok[1], tuple(_int(t, "qubit index", lineno) for t in tok[2:]))
        elif head == "M":
            if len(tok) != 4 or tok[2] != "->":
                raise CircuitError("usage: M q -> cK", lineno)
            inst = Measure(_int(tok[1], "qubit index", lineno), _bit(tok[3], lineno))
        elif head == "IF":
            if len(tok) < 3:
                raise CircuitError("usage: IF cK GATE q [q]", lineno)
            inst = Conditional(_bit(tok[1], lineno), _gate(tok[2:], lineno))
        elif head == "RESET":
            if len(tok) != 2:
                raise CircuitError("RESET takes 1 qubit", lineno)
            inst = Reset(_int(tok[1], "qubit index", lineno))
        else:
            inst = _gate(tok, lineno)
        insts.append(inst)
        lines.append(lineno)
    if num_qubits is None:
        raise CircuitError("missing 'qubits N' header")
    if num_bits is None:
        used = [i.bit for i in insts if isinstance(i, (Measure, Conditional))]
        num_bits = max(used) + 1 if used else 0
    c = Circuit(num_qubits, num_bits, insts)
    diags = validate(c)
    if diags:
        d = diags[0]
        raise CircuitError(d.message, lines[d.index] if d.index >= 0 else header_line)
    return c


def _render_inst(inst) -> str:
    if isinstance(inst, CliffordGate):
        return str(inst)
    if isinstance(inst, NonClifford):
        if inst.name == "T" and len(inst.targets) == 1:
            return f"T {inst.targets[0]}"
        return " ".join(["GADGET", inst.name, *map(str, inst.targets)])
    if isinstance(inst, Measure):
        return f"M {inst.qubit} -> c{inst.bit}"
    if isinstance(inst, Conditional):
        return f"IF c{inst.bit} {inst.gate}"
    if isinstance(inst, Reset):
        return f"RESET {inst.qubit}"
    raise TypeError(f"cannot render {inst!r}")


def render(c: Circuit) -> str:
    out = [f"qubits {c.num_qubits}"]
    if c.num_bits:
        out.append(f"bits {c.num_bits}")
    out.extend(_render_inst(i) for i in c.instructions)
    return "\n".join(out) + "\n"


# -- gadget expansion -------------------------------------------------------


@dataclass
class AncillaRegister:
    """Qubits of an expanded circuit that must start in ``state``."""

    gadget: str
    qubits: tuple[int, ...]
    state: np.ndarray = field(repr=False)
    reusable: bool = True


def _remap(inst, qmap: Sequence[int], bmap: Mapping[int, int]):
    if isinstance(inst, CliffordGate):
        return CliffordGate(inst.kind, [qmap[t] for t in inst.targets])
    if isinstance(inst, Measure):
        return Measure(qmap[inst.qubit], bmap[inst.bit])
    if isinstance(inst, Conditional):
        return Conditional(bmap[inst.bit], CliffordGate(inst.gate.kind, [qmap[t] for t in inst.gate.targets]))
    if isinstance(inst, Reset):
        return Reset(qmap[inst.qubit])
    raise ValueError(f"gadget bodies must be Clifford-only, found {inst!r}")


def expand_gadgets(c: Circuit, lib: Optional[Mapping] = None) -> tuple[Circuit, list[AncillaRegister]]:
    """Replace every non-Clifford instruction by its gadget body.

    Reusable gadgets get one ancilla register per gadget name, appended after
    the data qubits and shared by all occurrences. Consumable gadgets get a
    fresh register per occurrence, appended after the reusable ones. Gadget
    measurements write fresh classical bits after the circuit's own.
    """
    if c.is_clifford:
        return c, []
    if lib is None:
        from .gadgets import default_library

        lib = default_library()

    def lookup(name):
        try:
            return lib[name]
        except KeyError:
            raise GadgetResolutionError(f"no gadget named {name!r}") from None

    next_q = c.num_qubits
    next_b = c.num_bits
    shared: dict[str, AncillaRegister] = {}
    ancillas: list[AncillaRegister] = []
    for inst in c.instructions:
        if isinstance(inst, NonClifford):
            g = lookup(inst.name)
            if g.reusable and inst.name not in shared:
                reg = AncillaRegister(g.name, tuple(range(next_q, next_q + g.ancilla_qubits)), g.ancilla_state, True)
                next_q += g.ancilla_qubits
                shared[inst.name] = reg
                ancillas.append(reg)

    out = []
    for inst in c.instructions:
        if not isinstance(inst, NonClifford):
            out.append(inst)
            continue
        g = lookup(inst.name)
        if len(inst.targets) != g.data_qubits:
            raise ValueError(f"{inst.name} acts on {g.data_qubits} qubit(s), got {len(inst.targets)}")
        if g.reusable:
            anc = shared[inst.name].qubits
        else:
            anc = tuple(range(next_q, next_q + g.ancilla_qubits))
            next_q += g.ancilla_qubits
            ancillas.append(AncillaRegister(g.name, anc, g.ancilla_state, False))
        qmap = list(anc) + list(inst.targets)
        bmap = {}
        for b in range(g.body.num_bits):
            bmap[b] = next_b
            next_b += 1
        out.extend(_remap(i, qmap, bmap) for i in g.body.instructions)
    return Circuit(next_q, next_b, out), ancillas


# -- random circuits --------------------------------------------------------

_ONE_Q = ("H", "S", "SDG", "X", "Y", "Z", "SX", "SXDG")
_TWO_Q = ("CNOT", "CZ", "SWAP")


def random_circuit(num_qubits: int, depth: int, rng, max_measurements: int = 8,
                   p_measure: float = 0.1, p_conditional: float = 0.1, p_reset: float = 0.03) -> Circuit:
    """Random Clifford circuit with measurements, feedback and resets.

    ``depth`` counts instructions. Measurements and resets together never
    exceed ``max_measurements``; conditionals only read bits already written.
    """
    insts: list = []
    written: list[int] = []
    used = 0
    for _ in range(depth):
        u = rng.random()
        if used < max_measurements and u < p_measure:
            q = int(rng.integers(num_qubits))
            insts.append(Measure(q, len(written)))
            written.append(len(written))
            used += 1
        elif used < max_measurements and u < p_measure + p_reset:
            insts.append(Reset(int(rng.integers(num_qubits))))
            used += 1
        elif written and u < p_measure + p_reset + p_conditional:
            b = int(rng.choice(written))
            insts.append(Conditional(b, _random_gate(num_qubits, rng)))
        else:
            insts.append(_random_gate(num_qubits, rng))
    return Circuit(num_qubits, len(written), insts)


def _random_gate(num_qubits: int, rng) -> CliffordGate:
    if num_qubits > 1 and rng.random() < 0.4:
        a, b = rng.choice(num_qubits, size=2, replace=False)
        return CliffordGate(MNEMONICS[_TWO_Q[rng.integers(len(_TWO_Q))]], (int(a), int(b)))
    return CliffordGate(MNEMONICS[_ONE_Q[rng.integers(len(_ONE_Q))]], (int(rng.integers(num_qubits)),))
