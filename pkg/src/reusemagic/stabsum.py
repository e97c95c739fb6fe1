"""Clifford circuits driven by a non-stabilizer ancilla, simulated as a signed
mixture of stabilizer tableaus.

The ancilla density matrix is expanded over the stabilizer frame, giving
``rho = sum_k w_k sigma_k`` with real (possibly negative) weights and
stabilizer states ``sigma_k``. Every Clifford gate acts on each term
separately. A Z measurement has mixture probability
``p(b) = sum_k w_k p_k(b)`` with ``p_k(b)`` in {0, 1/2, 1}; the sampled bit is
forced into every term and the weights become ``w_k p_k(b) / p(b)``. Terms
with ``p_k(b) = 0`` are dropped, so the term count never grows.

All terms live in one stacked ``(K, 2N, N)`` bit array so gate updates are a
single vectorized column operation across the whole mixture.
"""

from __future__ import annotations

import warnings
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .circuit import AncillaRegister, Circuit, Conditional, Measure, Reset
from .decomp import decompose
from .oracle import InvalidStateError, bitstring
from .pauli import CliffordGate
from .tableau import Tableau, write_frame_rows

PROB_TOL = 1e-9
DROP_BRANCH = 1e-12
MAX_EXACT_MEASUREMENTS = 16
TERM_WARNING = 36


class NotExpandedError(ValueError):
    pass


class BranchOverflowError(ValueError):
    pass


class TermCountWarning(UserWarning):
    pass


class StabMixture:
    """Weighted stack of tableaus plus the circuit they will run."""

    def __init__(self, weights, x, z, r, circuit: Circuit, num_ancilla_qubits: int, placement):
        self.weights = np.asarray(weights, dtype=float)
        self.x = x
        self.z = z
        self.r = r
        self.circuit = circuit
        self.num_ancilla_qubits = num_ancilla_qubits
        self.placement = tuple(placement)
        self.bits: list[Optional[int]] = [None] * circuit.num_bits

    @property
    def num_qubits(self) -> int:
        return self.x.shape[2]

    @property
    def num_data_qubits(self) -> int:
        return self.num_qubits - self.num_ancilla_qubits

    @property
    def num_terms(self) -> int:
        return self.weights.size

    @property
    def terms(self) -> list[tuple[float, Tableau]]:
        return [(float(w), Tableau(self.x[k], self.z[k], self.r[k])) for k, w in enumerate(self.weights)]

    def copy(self) -> "StabMixture":
        m = StabMixture(self.weights.copy(), self.x.copy(order="K"), self.z.copy(order="K"), self.r.copy(),
                        self.circuit, self.num_ancilla_qubits, self.placement)
        m.bits = list(self.bits)
        return m

    def record(self) -> dict[str, int]:
        return {f"c{i}": (0 if b is None else int(b)) for i, b in enumerate(self.bits)}

    # -- evolution ----------------------------------------------------------

    def apply_gate(self, g: CliffordGate):
        _kernels.apply_gate(self.x, self.z, self.r, g.kind.value, g.targets)

    def outcome_probabilities(self, qubit: int) -> tuple[float, np.ndarray]:
        """Mixture ``p(1)`` and the per-term ``p_k(1)`` without touching the state."""
        peek = _kernels.peek_batch(self.x, self.z, self.r, qubit)
        pk1 = np.where(peek < 0, 0.5, peek.astype(float))
        p1 = float(np.dot(self.weights, pk1))
        if not -PROB_TOL <= p1 <= 1 + PROB_TOL:
            raise InvalidStateError(f"mixture probability {p1!r} outside [0, 1]: ancilla state is not physical")
        return min(max(p1, 0.0), 1.0), pk1

    def force(self, qubit: int, bit: int, p_bit: float):
        """Condition every term on ``Z_qubit = bit`` and renormalize by ``p_bit``."""
        _, codes = _kernels.measure_batch(self.x, self.z, self.r, qubit, int(bit), True)
        pk = np.take(_kernels.PROB_VALUES, codes)
        w = self.weights * pk / p_bit
        alive = pk > 0
        if not alive.all():
            self.x = _kernels.as_column_major(self.x[alive])
            self.z = _kernels.as_column_major(self.z[alive])
            self.r = self.r[alive]
            w = w[alive]
        self.weights = w

    def step(self, inst, rng):
        """Apply one instruction, sampling measurement outcomes from ``rng``."""
        if isinstance(inst, CliffordGate):
            self.apply_gate(inst)
        elif isinstance(inst, Conditional):
            if self.bits[inst.bit] == 1:
                self.apply_gate(inst.gate)
        elif isinstance(inst, (Measure, Reset)):
            p1, _ = self.outcome_probabilities(inst.qubit)
            bit = int(rng.random() < p1)
            self.force(inst.qubit, bit, p1 if bit else 1.0 - p1)
            if isinstance(inst, Measure):
                self.bits[inst.bit] = bit
            elif bit:
                self.apply_gate(CliffordGate("X", (inst.qubit,)))
        else:
            raise NotExpandedError(f"cannot simulate {inst!r}; run expand_gadgets first")


def _require_clifford(c: Circuit):
    if not c.is_clifford:
        raise NotExpandedError("circuit has non-Clifford instructions; run expand_gadgets first")


def init(c: Circuit, ancilla_rho: Optional[np.ndarray] = None,
         placement: Optional[Sequence[int]] = None) -> StabMixture:
    """One tableau per frame term of the ancilla; every other qubit starts in |0>.

    ``ancilla_rho`` may be a state vector or density matrix. With no ancilla
    the mixture is a single tableau of weight 1.
    """
    _require_clifford(c)
    n = c.num_qubits
    if ancilla_rho is None:
        weights, labels, placement = np.ones(1), [()], ()
        q = 0
    else:
        frame = decompose(ancilla_rho)
        q = frame.num_qubits
        placement = tuple(range(n - q, n)) if placement is None else tuple(placement)
        if len(placement) != q or len(set(placement)) != q or not all(0 <= p < n for p in placement):
            raise ValueError(f"bad placement {placement} for a {q}-qubit ancilla on {n} qubits")
        weights = np.array([w for w, _ in frame.terms])
        labels = [labs for _, labs in frame.terms]
    k = weights.size
    x, z, r = _kernels.zeros_tableau(n, (k,))
    idx = np.arange(n)
    x[:, idx, idx] = 1
    z[:, n + idx, idx] = 1
    for t, labs in enumerate(labels):
        write_frame_rows(x[t], z[t], r[t], labs, placement)
    if k > TERM_WARNING:
        warnings.warn(f"{k} mixture terms: cost grows as 6**q with the ancilla size q = {q}",
                      TermCountWarning, stacklevel=2)
    return StabMixture(weights, x, z, r, c, q, placement)


def ancilla_density(ancillas: Sequence[AncillaRegister]) -> tuple[Optional[np.ndarray], tuple[int, ...]]:
    """Joint ancilla density matrix and placement from an expansion's ancilla map."""
    if not ancillas:
        return None, ()
    rho = np.ones((1, 1), dtype=complex)
    placement = []
    for reg in ancillas:
        s = np.asarray(reg.state, dtype=complex)
        if s.ndim == 1:
            s = np.outer(s, s.conj())
        rho = np.kron(rho, s)
        placement.extend(reg.qubits)
    return rho, tuple(placement)


def init_from_expansion(c: Circuit, ancillas: Sequence[AncillaRegister]) -> StabMixture:
    rho, placement = ancilla_density(ancillas)
    return init(c, rho, placement)


def run_sample(m: StabMixture, seed=None, rng=None) -> dict[str, int]:
    """Sample one full run of ``m.circuit``; ``m`` itself is left untouched."""
    rng = np.random.default_rng(seed) if rng is None else rng
    work = m.copy()
    for inst in work.circuit.instructions:
        work.step(inst, rng)
    return work.record()


def exact_distribution(m: StabMixture, c: Optional[Circuit] = None,
                       max_measurements: int = MAX_EXACT_MEASUREMENTS) -> dict[str, float]:
    """Enumerate every measurement branch; returns ``{bitstring: probability}``."""
    c = m.circuit if c is None else c
    _require_clifford(c)
    if c.measurement_count > max_measurements:
        raise BranchOverflowError(f"{c.measurement_count} measurements exceed the cap of {max_measurements}")
    branches = [(1.0, m.copy())]
    for inst in c.instructions:
        if isinstance(inst, CliffordGate):
            for _, b in branches:
                b.apply_gate(inst)
        elif isinstance(inst, Conditional):
            for _, b in branches:
                if b.bits[inst.bit] == 1:
                    b.apply_gate(inst.gate)
        elif isinstance(inst, (Measure, Reset)):
            new = []
            for prob, b in branches:
                p1, _ = b.outcome_probabilities(inst.qubit)
                for bit, pb in ((0, 1.0 - p1), (1, p1)):
                    if pb <= DROP_BRANCH:
                        continue
                    child = b.copy()
                    child.force(inst.qubit, bit, pb)
                    if isinstance(inst, Measure):
                        child.bits[inst.bit] = bit
                    elif bit:
                        child.apply_gate(CliffordGate("X", (inst.qubit,)))
                    new.append((prob * pb, child))
            branches = new
        else:
            raise NotExpandedError(f"cannot simulate {inst!r}; run expand_gadgets first")
    out: dict[str, float] = {}
    for prob, b in branches:
        key = bitstring(b.bits)
        out[key] = out.get(key, 0.0) + prob
    return dict(sorted(out.items()))

