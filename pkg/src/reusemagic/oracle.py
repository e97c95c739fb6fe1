"""Brute-force statevector reference simulator.

Qubit 0 is the leftmost tensor factor (most significant bit of a basis
index). States are plain complex numpy arrays; branch enumeration keeps one
unnormalized state per measurement record, so classical feedback is exact.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Optional, Sequence

import numpy as np

from .circuit import Circuit, Conditional, Measure, NonClifford, Reset
from .pauli import CliffordGate, GateKind

MAX_PURE_QUBITS = 12
MAX_DENSITY_QUBITS = 6
MAX_MEASUREMENTS = 20
_DROP = 1e-28

_s2 = 1 / np.sqrt(2)
_ONE_QUBIT = {
    GateKind.H: np.array([[_s2, _s2], [_s2, -_s2]], dtype=complex),
    GateKind.S: np.diag([1, 1j]),
    GateKind.S_DAG: np.diag([1, -1j]),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.diag([1, -1]).astype(complex),
    GateKind.SQRT_X: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    GateKind.SQRT_X_DAG: 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]]),
}
_TWO_QUBIT = {
    GateKind.CNOT: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
T_MATRIX = np.diag([1, np.exp(1j * np.pi / 4)])
DEFAULT_UNITARIES = {"T": T_MATRIX}


class OracleLimitError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


def gate_matrix(kind) -> np.ndarray:
    """Dense unitary of a gate kind; two-qubit gates act on (first, second) target."""
    kind = kind.kind if isinstance(kind, CliffordGate) else kind
    return (_ONE_QUBIT.get(kind) if kind in _ONE_QUBIT else _TWO_QUBIT[kind]).copy()


def basis_state(num_qubits: int, index: int = 0) -> np.ndarray:
    v = np.zeros(2 ** num_qubits, dtype=complex)
    v[index] = 1
    return v


def check_state(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(psi.size)))
    if 2 ** n != psi.size:
        raise InvalidStateError(f"length {psi.size} is not a power of two")
    if abs(np.linalg.norm(psi) - 1) > tol:
        raise InvalidStateError(f"state norm {np.linalg.norm(psi)!r} != 1")
    return psi


def check_density(rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if rho.ndim != 2 or rho.shape != (d, d) or d & (d - 1) or d < 2:
        raise InvalidStateError(f"density matrix must be 2^q x 2^q, got {rho.shape}")
    if d > 2 ** MAX_DENSITY_QUBITS:
        raise OracleLimitError(f"density matrices are limited to {MAX_DENSITY_QUBITS} qubits")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError(f"density matrix trace {np.trace(rho).real!r} != 1")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def num_qubits_of(dim: int) -> int:
    return int(round(np.log2(dim)))


def random_statevector(num_qubits: int, rng) -> np.ndarray:
    v = rng.normal(size=2 ** num_qubits) + 1j * rng.normal(size=2 ** num_qubits)
    return v / np.linalg.norm(v)


def random_density(num_qubits: int, rng, rank: Optional[int] = None) -> np.ndarray:
    """Ginibre-ensemble density matrix (full rank unless ``rank`` is given)."""
    d = 2 ** num_qubits
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


# -- tensor helpers ---------------------------------------------------------


def _apply(psi: np.ndarray, u: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    ut = u.reshape([2] * (2 * k))
    out = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _project(psi: np.ndarray, axis: int, bit: int) -> np.ndarray:
    out = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[axis] = 1 - bit
    out[tuple(idx)] = 0
    return out


def _norm2(psi: np.ndarray) -> float:
    return float(np.vdot(psi, psi).real)


def _unitary_for(inst, unitaries: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(inst, CliffordGate):
        return gate_matrix(inst.kind)
    try:
        return np.asarray(unitaries[inst.name], dtype=complex)
    except KeyError:
        raise ValueError(f"no unitary supplied for non-Clifford {inst.name!r}") from None


def _targets(inst):
    return inst.gate.targets if isinstance(inst, Conditional) else inst.targets


def _run_branches(c: Circuit, psi: np.ndarray, unitaries, offset: int = 0):
    """Every measurement branch as ``(unnormalized tensor, bits tuple)``."""
    if c.measurement_count > MAX_MEASUREMENTS:
        raise OracleLimitError(f"{c.measurement_count} measurements exceed the cap of {MAX_MEASUREMENTS}")
    branches = [(psi, (None,) * c.num_bits)]
    for inst in c.instructions:
        if isinstance(inst, (CliffordGate, NonClifford)):
            u = _unitary_for(inst, unitaries)
            ax = [t + offset for t in inst.targets]
            branches = [(_apply(s, u, ax), b) for s, b in branches]
        elif isinstance(inst, Conditional):
            u = gate_matrix(inst.gate.kind)
            ax = [t + offset for t in inst.gate.targets]
            branches = [(_apply(s, u, ax) if b[inst.bit] == 1 else s, b) for s, b in branches]
        elif isinstance(inst, Measure):
            new = []
            for s, b in branches:
                for v in (0, 1):
                    p = _project(s, inst.qubit + offset, v)
                    if _norm2(p) > _DROP:
                        bits = list(b)
                        bits[inst.bit] = v
                        new.append((p, tuple(bits)))
            branches = new
        elif isinstance(inst, Reset):
            new = []
            x = gate_matrix(GateKind.X)
            for s, b in branches:
                for v in (0, 1):
                    p = _project(s, inst.qubit + offset, v)
                    if _norm2(p) > _DROP:
                        new.append((_apply(p, x, [inst.qubit + offset]) if v else p, b))
            branches = new
        else:
            raise TypeError(f"unknown instruction {inst!r}")
    return branches


def bitstring(bits) -> str:
    return "".join("0" if b is None else str(b) for b in bits)


# -- public API ---------------------------------------------------------------


def simulate_pure(c: Circuit, psi: Optional[np.ndarray] = None, seed=None,
                  unitaries: Optional[Mapping[str, np.ndarray]] = None):
    """Run one trajectory. Returns ``(final state, {bit index: value})``."""
    n = c.num_qubits
    if n > MAX_PURE_QUBITS:
        raise OracleLimitError(f"{n} qubits exceed the pure-state cap of {MAX_PURE_QUBITS}")
    unitaries = DEFAULT_UNITARIES if unitaries is None else unitaries
    rng = np.random.default_rng(seed)
    psi = basis_state(n) if psi is None else check_state(psi)
    if psi.size != 2 ** n:
        raise ValueError(f"state has {psi.size} amplitudes, circuit needs {2 ** n}")
    s = psi.reshape([2] * n)
    record = {}
    for inst in c.instructions:
        if isinstance(inst, (CliffordGate, NonClifford)):
            s = _apply(s, _unitary_for(inst, unitaries), inst.targets)
        elif isinstance(inst, Conditional):
            if record.get(inst.bit) == 1:
                s = _apply(s, gate_matrix(inst.gate.kind), inst.gate.targets)
        else:
            p1 = _norm2(_project(s, inst.qubit, 1))
            v = int(rng.random() < p1)
            s = _project(s, inst.qubit, v)
            s = s / np.sqrt(_norm2(s))
            if isinstance(inst, Measure):
                record[inst.bit] = v
            elif v:
                s = _apply(s, gate_matrix(GateKind.X), [inst.qubit])
    return s.reshape(-1), record


def embed_ancilla(num_qubits: int, placement: Sequence[int], ancilla: np.ndarray) -> np.ndarray:
    """``|0...0>`` on the other qubits with the ancilla vector on ``placement``."""
    q = len(placement)
    rest = [i for i in range(num_qubits) if i not in set(placement)]
    full = np.kron(ancilla.reshape(-1), basis_state(num_qubits - q)).reshape([2] * num_qubits)
    order = list(placement) + rest
    return np.moveaxis(full, list(range(num_qubits)), order).reshape(-1)


def _pure_ensemble(c: Circuit, psi, rho_ancilla, placement):
    n = c.num_qubits
    if rho_ancilla is None:
        if psi is None:
            return [(1.0, basis_state(n))]
        return [(1.0, check_state(psi))]
    rho = np.asarray(rho_ancilla, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    rho = check_density(rho)
    q = num_qubits_of(rho.shape[0])
    placement = list(range(n - q, n)) if placement is None else list(placement)
    if len(placement) != q:
        raise ValueError(f"placement lists {len(placement)} qubits for a {q}-qubit ancilla")
    vals, vecs = np.linalg.eigh(rho)
    return [(float(w), embed_ancilla(n, placement, vecs[:, k])) for k, w in enumerate(vals) if w > 1e-15]


def distribution(c: Circuit, psi: Optional[np.ndarray] = None, rho_ancilla: Optional[np.ndarray] = None,
                 placement: Optional[Sequence[int]] = None,
                 unitaries: Optional[Mapping[str, np.ndarray]] = None) -> dict[str, float]:
    """Exact Born-rule distribution over the classical register.

    Input is either a full statevector ``psi`` or an ancilla state (vector or
    density matrix) on ``placement`` with ``|0>`` on every other qubit.
    Keys are bitstrings ``c0 c1 ...``; bits never written read as 0.
    """
    n = c.num_qubits
    if n > MAX_PURE_QUBITS:
        raise OracleLimitError(f"{n} qubits exceed the pure-state cap of {MAX_PURE_QUBITS}")
    unitaries = DEFAULT_UNITARIES if unitaries is None else unitaries
    out: dict[str, float] = {}
    for w, vec in _pure_ensemble(c, psi, rho_ancilla, placement):
        for s, bits in _run_branches(c, vec.reshape([2] * n), unitaries):
            key = bitstring(bits)
            out[key] = out.get(key, 0.0) + w * _norm2(s)
    return dict(sorted(out.items()))


def channel_of_circuit(c: Circuit, subsystem: Sequence[int], env_state: Optional[np.ndarray] = None,
                       unitaries: Optional[Mapping[str, np.ndarray]] = None, per_branch: bool = False):
    """Choi matrix of the map induced on ``subsystem``.

    The remaining qubits (in increasing index order) start in ``env_state``
    (vector or density matrix; ``|0...0>`` by default) and are traced out
    at the end, as are all measurement records. The Choi matrix is
    ``sum_ij |i><j| (x) E(|i><j|)`` with the reference factor first, so
    its trace is ``2**len(subsystem)``. With ``per_branch`` a dict from
    bitstring to the (trace-scaled) Choi matrix of each branch is returned.
    """
    n = c.num_qubits
    subsystem = list(subsystem)
    env = [i for i in range(n) if i not in set(subsystem)]
    k = len(subsystem)
    if n > MAX_DENSITY_QUBITS:
        raise OracleLimitError(f"channel extraction is limited to {MAX_DENSITY_QUBITS} qubits")
    unitaries = DEFAULT_UNITARIES if unitaries is None else unitaries
    if env_state is None:
        env_ens = [(1.0, basis_state(len(env)))] if env else [(1.0, np.ones(1, dtype=complex))]
    else:
        rho = np.asarray(env_state, dtype=complex)
        if rho.ndim == 1:
            env_ens = [(1.0, check_state(rho))]
        else:
            vals, vecs = np.linalg.eigh(check_density(rho))
            env_ens = [(float(w), vecs[:, j]) for j, w in enumerate(vals) if w > 1e-15]
    d = 2 ** k
    phi = np.eye(d, dtype=complex).reshape(-1)  # sum_i |i>_R |i>_S
    chois: dict[str, np.ndarray] = {}
    for w, e in env_ens:
        full = np.kron(phi, e).reshape([2] * (k + n))
        # axes now: R (k), S (k), env; reorder S/env into circuit order
        src = list(range(k, k + n))
        dst = [k + i for i in subsystem + env]
        full = np.moveaxis(full, src, dst)
        for s, bits in _run_branches(c, full, unitaries, offset=k):
            keep = list(range(k)) + [k + i for i in subsystem]
            drop = [k + i for i in env]
            t = np.transpose(s, keep + drop).reshape(d * d, -1)
            j = w * (t @ t.conj().T)
            key = bitstring(bits) if per_branch else ""
            chois[key] = chois.get(key, 0) + j
    if per_branch:
        return dict(sorted(chois.items()))
    return chois[""]


def unitary_choi(u: np.ndarray) -> np.ndarray:
    v = np.asarray(u).T.reshape(-1)
    return np.outer(v, v.conj())


def process_fidelity(choi: np.ndarray, u: np.ndarray) -> float:
    """``<<U|J|U>> / d^2``; equals 1 iff the channel is conjugation by ``u``."""
    d = u.shape[0]
    v = np.asarray(u).T.reshape(-1)
    return float(np.vdot(v, choi @ v).real / d ** 2)


def apply_choi(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    j = choi.reshape(d, d, d, d)  # (r, s_out, r', s_out')
    return np.einsum("ij,iajb->ab", rho, j)


def frame_design(num_qubits: int) -> list[np.ndarray]:
    """The 6**k product states of the single-qubit stabilizer frame."""
    from .tableau import FrameLabel

    vecs = [lab.statevector() for lab in FrameLabel]
    out = []
    for combo in itertools.product(vecs, repeat=num_qubits):
        v = np.ones(1, dtype=complex)
        for c1 in combo:
            v = np.kron(v, c1)
        out.append(v)
    return out


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def channel_distance(choi_a: np.ndarray, choi_b: np.ndarray) -> float:
    """Max output trace distance over the frame input design."""
    d = int(round(np.sqrt(choi_a.shape[0])))
    worst = 0.0
    for v in frame_design(num_qubits_of(d)):
        rho = np.outer(v, v.conj())
        worst = max(worst, trace_distance(apply_choi(choi_a, rho), apply_choi(choi_b, rho)))
    return worst


def is_unitary_channel(choi: np.ndarray, tol: float = 1e-10) -> bool:
    """A trace-preserving channel is unitary iff its Choi matrix has rank one."""
    vals = np.sort(np.linalg.eigvalsh(choi))[::-1]
    d = int(round(np.sqrt(choi.shape[0])))
    return abs(vals[0] - d) <= tol and np.all(np.abs(vals[1:]) <= tol)


def circuit_unitary(c: Circuit, unitaries: Optional[Mapping[str, np.ndarray]] = None) -> np.ndarray:
    """Dense unitary of a measurement-free circuit."""
    if c.measurement_count or any(isinstance(i, Conditional) for i in c.instructions):
        raise ValueError("circuit has measurements or feedback")
    unitaries = DEFAULT_UNITARIES if unitaries is None else unitaries
    n = c.num_qubits
    d = 2 ** n
    m = np.eye(d, dtype=complex).reshape([2] * n + [d])
    for inst in c.instructions:
        m = _apply(m, _unitary_for(inst, unitaries), inst.targets)
    return m.reshape(d, d)
