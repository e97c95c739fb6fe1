"""Exhaustive search for reusable-ancilla gadgets over small Clifford groups.

For a Clifford ``C`` on ancilla (+) data and an ancilla state ``|M>``, let
``A_M = (<M| (x) I) C (|M> (x) I)``. ``C`` reuses ``|M>`` exactly when
``A_M`` is unitary, and then ``A_M`` is the unitary applied to the data.

For a one-qubit ancilla, ``A_M`` is affine in the Bloch vector ``v`` of
``|M>``, so the leakage ``L(v) = 1 - Tr(A_M^dag A_M) / D`` is a quadratic on
the unit sphere, nonnegative, and zero exactly on the solutions. The solver
runs a batched Riemannian Newton descent from a Fibonacci grid and keeps
the points where ``||A_M^dag A_M - I||_F`` is below tolerance. The zero set
of a quadratic on the sphere is empty, one or two points, a circle, or the
whole sphere; more than two distinct solutions are reported as a family.
"""

from __future__ import annotations

import functools
import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.optimize

from . import _kernels
from .circuit import Circuit
from .oracle import circuit_unitary
from .pauli import CliffordGate, PauliString, all_paulis, gate

RESIDUAL_TOL = 1e-8
INCONCLUSIVE_TOL = 1e-4
DEDUP_TOL = 1e-6

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


def group_order(n: int) -> int:
    """Order of the n-qubit Clifford group modulo global phase."""
    out = 2 ** (n * n + 2 * n)
    for j in range(1, n + 1):
        out *= 4 ** j - 1
    return out


@dataclass(frozen=True, eq=False)
class CliffordElement:
    """A Clifford modulo phase, stored as the signed images of X_i and Z_i.

    Rows ``0..n-1`` of ``x``/``z``/``r`` are the images of ``X_i``, rows
    ``n..2n-1`` those of ``Z_i`` (the tableau layout).
    """

    num_qubits: int
    x: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    canonical_id: int = -1
    witness_circuit: tuple = ()

    @property
    def key(self) -> bytes:
        return _key(self.x, self.z, self.r)

    @property
    def symplectic_action(self) -> list[PauliString]:
        """Images of ``X_1, Z_1, X_2, Z_2, ...`` in that order."""
        n = self.num_qubits
        rows = [i for q in range(n) for i in (q, n + q)]
        return [PauliString(self.x[i], self.z[i], 2 * int(self.r[i])) for i in rows]

    def unitary(self) -> np.ndarray:
        return circuit_unitary(Circuit(self.num_qubits, 0, self.witness_circuit))

    def describe(self) -> str:
        names = [f"{p}{q}" for q in range(self.num_qubits) for p in "XZ"]
        return ", ".join(f"{a}->{img}" for a, img in zip(names, self.symplectic_action))


def _key(x, z, r) -> bytes:
    n = x.shape[1]
    rows = [i for q in range(n) for i in (q, n + q)]
    return b"".join(x[i].tobytes() + z[i].tobytes() + bytes([r[i]]) for i in rows)


def generators(n: int) -> list[CliffordGate]:
    gens = [gate("H", q) for q in range(n)] + [gate("S", q) for q in range(n)]
    gens += [gate("CNOT", a, b) for a, b in permutations(range(n), 2)]
    return gens


def _identity_arrays(n):
    x = np.zeros((2 * n, n), dtype=np.uint8)
    z = np.zeros((2 * n, n), dtype=np.uint8)
    x[np.arange(n), np.arange(n)] = 1
    z[n + np.arange(n), np.arange(n)] = 1
    return x, z, np.zeros(2 * n, dtype=np.uint8)


def element_from_circuit(n: int, gates: Sequence[CliffordGate]) -> CliffordElement:
    x, z, r = _identity_arrays(n)
    for g in gates:
        _kernels.apply_gate(x, z, r, g.kind.value, g.targets)
    return CliffordElement(n, x, z, r, -1, tuple(gates))


@functools.lru_cache(maxsize=4)
def enumerate_group(n: int) -> tuple[CliffordElement, ...]:
    """Breadth-first closure of {H_i, S_i, CNOT_ij}, sorted by canonical image tuple.

    Each element carries a shortest generator word as its witness circuit.
    """
    if n not in (1, 2):
        raise ValueError("enumeration is supported for n = 1 or 2")
    gens = generators(n)
    x, z, r = _identity_arrays(n)
    seen = {_key(x, z, r): (x, z, r, ())}
    frontier = [(x, z, r, ())]
    while frontier:
        nxt = []
        for x, z, r, word in frontier:
            for g in gens:
                x2, z2, r2 = x.copy(), z.copy(), r.copy()
                _kernels.apply_gate(x2, z2, r2, g.kind.value, g.targets)
                k = _key(x2, z2, r2)
                if k not in seen:
                    item = (x2, z2, r2, word + (g,))
                    seen[k] = item
                    nxt.append(item)
        frontier = nxt
    out = []
    for cid, k in enumerate(sorted(seen)):
        x, z, r, word = seen[k]
        for a in (x, z, r):
            a.setflags(write=False)
        out.append(CliffordElement(n, x, z, r, cid, word))
    return tuple(out)


def group_index(n: int) -> dict[bytes, CliffordElement]:
    return {e.key: e for e in enumerate_group(n)}


def compose(first: CliffordElement, then: CliffordElement) -> CliffordElement:
    """The element ``then * first`` (apply ``first``, then ``then``)."""
    x, z, r = first.x.copy(), first.z.copy(), first.r.copy()
    for g in then.witness_circuit:
        _kernels.apply_gate(x, z, r, g.kind.value, g.targets)
    return CliffordElement(first.num_qubits, x, z, r, -1, first.witness_circuit + then.witness_circuit)


def sample_group(n: int, count: int, rng) -> list[CliffordElement]:
    """Random elements from long random generator words (for n >= 3)."""
    gens = generators(n)
    length = 20 * n * n
    return [element_from_circuit(n, [gens[i] for i in rng.integers(len(gens), size=length)])
            for _ in range(count)]


# -- solving ------------------------------------------------------------------


def induced_map(u: np.ndarray, m: np.ndarray, ancilla_qubits: int = 1) -> np.ndarray:
    """``A_M = (<M| (x) I) U (|M> (x) I)`` with the ancilla as the leading factor."""
    a = 2 ** ancilla_qubits
    dd = u.shape[0] // a
    blocks = u.reshape(a, dd, a, dd)
    return np.einsum("i,iajb,j->ab", m.conj(), blocks, m)


def residual(u: np.ndarray, m: np.ndarray, ancilla_qubits: int = 1) -> float:
    """``||A_M^dag A_M - I||_F``; zero iff ``|M>`` is reused exactly."""
    am = induced_map(u, m, ancilla_qubits)
    return float(np.linalg.norm(am.conj().T @ am - np.eye(am.shape[0])))


def bloch_to_state(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    theta = np.arccos(np.clip(v[..., 2], -1, 1))
    phi = np.arctan2(v[..., 1], v[..., 0])
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def state_to_bloch(m: np.ndarray) -> np.ndarray:
    rho = np.outer(m, m.conj())
    return np.array([np.trace(rho @ _PAULI[k]).real for k in "XYZ"])


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    zc = 1 - 2 * i / count
    rad = np.sqrt(1 - zc ** 2)
    ang = np.pi * (1 + 5 ** 0.5) * i
    return np.stack([rad * np.cos(ang), rad * np.sin(ang), zc], axis=1)


def leakage_quadratic(u: np.ndarray):
    """``(c, b, Q)`` with ``L(v) = c + b.v + v^T Q v`` for a one-qubit ancilla."""
    dd = u.shape[0] // 2
    blocks = u.reshape(2, dd, 2, dd)
    # A(v) = A0 + sum_k v_k A_k, A_k = 1/2 sum_ij (sigma_k)_{ji} C_ij
    mats = [np.eye(2), _PAULI["X"], _PAULI["Y"], _PAULI["Z"]]
    a = [0.5 * np.einsum("ji,iajb->ab", s, blocks) for s in mats]
    gram = np.array([[np.trace(p.conj().T @ q).real for q in a] for p in a]) / dd
    c = 1 - gram[0, 0]
    b = -2 * gram[0, 1:]
    q = -gram[1:, 1:]
    return c, b, q


def sphere_minimizers(b: np.ndarray, q: np.ndarray, tol: float = 1e-9):
    """Exact minimizers of ``b.v + v^T Q v`` over the unit sphere.

    This is the trust-region subproblem on the boundary. Returns
    ``(kind, center, radius, basis)``: the minimizer set is
    ``center + radius * (unit vectors in span(basis))``, so ``kind`` is
    ``"point"`` (basis empty), ``"pair"`` (1 vector), ``"circle"`` (2) or
    ``"sphere"`` (3).
    """
    lam, vec = np.linalg.eigh(q)
    bp = vec.T @ b
    low = lam - lam[0] <= tol
    rest = ~low

    w0 = vec[:, rest] @ (-bp[rest] / (2 * (lam[rest] - lam[0])))
    blow = np.linalg.norm(bp[low])
    if blow > tol or w0 @ w0 > 1 + tol:
        # unique minimizer v(mu) = -(Q - mu)^-1 b / 2 with |v| = 1, mu < lam[0]
        keep = rest if blow <= tol else np.ones_like(rest)

        def secular(mu):
            return float(np.sum(bp[keep] ** 2 / (4 * (lam[keep] - mu) ** 2)) - 1)

        lo = lam[0] - np.linalg.norm(b) / 2 - 1.0
        hi = lam[0] - blow / 4 if blow > tol else lam[0]
        mu = scipy.optimize.brentq(secular, lo, hi, xtol=1e-15, rtol=1e-15) if secular(lo) < 0 else lo
        v = vec[:, keep] @ (-bp[keep] / (2 * (lam[keep] - mu)))
        return "point", v / np.linalg.norm(v), 0.0, np.zeros((3, 0))
    radius = float(np.sqrt(max(1 - w0 @ w0, 0.0)))
    basis = vec[:, low]
    if radius <= tol:
        return "point", w0 / np.linalg.norm(w0), 0.0, np.zeros((3, 0))
    kind = {1: "pair", 2: "circle", 3: "sphere"}[basis.shape[1]]
    return kind, w0, radius, basis


@dataclass
class Solution:
    ancilla_state: np.ndarray
    induced_unitary: np.ndarray
    residual: float
    classification: str  # "clifford" | "non_clifford"
    bloch: Optional[np.ndarray] = None

    def to_json(self) -> dict:
        out = {
            "residual": self.residual,
            "classification": self.classification,
            "unitary_action": pauli_action(self.induced_unitary),
        }
        if self.bloch is not None:
            out["bloch"] = [round(float(t), 10) for t in self.bloch]
        return out


@dataclass
class SearchResult:
    clifford_id: int
    solutions: list = field(default_factory=list)
    family: Optional[str] = None  # None, "circle" or "sphere"
    inconclusive: bool = False
    best_residual: float = float("inf")

    @property
    def classifications(self) -> list[str]:
        return [s.classification for s in self.solutions]


@functools.lru_cache(maxsize=8)
def _pauli_table(n: int):
    paulis = list(all_paulis(n))
    return paulis, np.array([p.to_matrix() for p in paulis])


def _best_pauli(u: np.ndarray, src: PauliString):
    """Largest Pauli overlap of ``u src u^dag``: (index, overlap)."""
    paulis, mats = _pauli_table(src.num_qubits)
    v = u @ src.to_matrix() @ u.conj().T
    ovl = np.einsum("kab,ab->k", mats.conj(), v) / u.shape[0]
    k = int(np.argmax(np.abs(ovl)))
    return k, ovl[k]


def is_clifford_unitary(u: np.ndarray, tol: float = RESIDUAL_TOL) -> bool:
    """Whether ``u X_i u^dag`` and ``u Z_i u^dag`` are all phased Pauli strings."""
    n = int(round(np.log2(u.shape[0])))
    return all(abs(_best_pauli(u, PauliString.single(n, i, letter))[1]) >= 1 - tol
               for i in range(n) for letter in "XZ")


def pauli_action(u: np.ndarray) -> str:
    """Label a unitary by its Pauli conjugation action (or ``non-clifford``)."""
    n = int(round(np.log2(u.shape[0])))
    if not is_clifford_unitary(u):
        return "non-clifford"
    paulis, _ = _pauli_table(n)
    parts = []
    for i in range(n):
        for letter in "XZ":
            src = PauliString.single(n, i, letter)
            k, o = _best_pauli(u, src)
            sign = "-" if o.real < 0 else "+"
            parts.append(f"{src.letters}->{sign}{paulis[k].letters}")
    return ",".join(parts)


def _dedup(points: np.ndarray, tol: float) -> list[int]:
    keep: list[int] = []
    for i, p in enumerate(points):
        if all(np.linalg.norm(p - points[j]) > tol for j in keep):
            keep.append(i)
    return keep


def _classify(u):
    return "clifford" if is_clifford_unitary(u) else "non_clifford"


def _solve_one_qubit_ancilla(u, cid):
    c, b, q = leakage_quadratic(u)
    kind, center, radius, basis = sphere_minimizers(b, q)
    if kind == "point":
        candidates = [center]
    elif kind == "pair":
        candidates = [center + radius * basis[:, 0], center - radius * basis[:, 0]]
    elif kind == "circle":
        ang = np.arange(6) * np.pi / 3
        candidates = [center + radius * (np.cos(t) * basis[:, 0] + np.sin(t) * basis[:, 1]) for t in ang]
    else:
        candidates = list(np.vstack([np.eye(3), -np.eye(3)]))
    candidates = [v / np.linalg.norm(v) for v in candidates]
    res = [residual(u, bloch_to_state(v)) for v in candidates]
    result = SearchResult(cid, best_residual=float(min(res)))
    if max(res) > RESIDUAL_TOL:
        # the minimum of L is positive: no state is reused exactly
        result.inconclusive = bool(min(res) <= INCONCLUSIVE_TOL)
        return result
    if kind in ("circle", "sphere"):
        result.family = kind
    for v in candidates:
        m = bloch_to_state(v)
        am = induced_map(u, m)
        result.solutions.append(Solution(m, am, residual(u, m), _classify(am), v))
    return result


def _solve_generic(u, cid, ancilla_qubits, restarts, rng):
    a = 2 ** ancilla_qubits

    def unpack(p):
        m = p[:a] + 1j * p[a:]
        return m / np.linalg.norm(m)

    def leak(p):
        am = induced_map(u, unpack(p), ancilla_qubits)
        return 1 - np.trace(am.conj().T @ am).real / am.shape[0]

    found, res_all = [], []
    for _ in range(restarts):
        p0 = rng.normal(size=2 * a)
        opt = scipy.optimize.minimize(leak, p0, method="BFGS", options={"gtol": 1e-12})
        m = unpack(opt.x)
        r = residual(u, m, ancilla_qubits)
        res_all.append(r)
        if r <= RESIDUAL_TOL:
            # fix global phase on the largest component for deduplication
            k = int(np.argmax(np.abs(m)))
            found.append(m * np.exp(-1j * np.angle(m[k])))
    result = SearchResult(cid, best_residual=float(min(res_all)))
    if not found:
        result.inconclusive = bool(min(res_all) <= INCONCLUSIVE_TOL)
        return result
    keep: list[np.ndarray] = []
    for m in found:
        if all(1 - abs(np.vdot(m, k2)) ** 2 > DEDUP_TOL for k2 in keep):
            keep.append(m)
    if len(keep) > 2:
        result.family = "continuous"
    for m in keep:
        am = induced_map(u, m, ancilla_qubits)
        result.solutions.append(Solution(m, am, residual(u, m, ancilla_qubits), _classify(am)))
    return result


def solve_reusable(elem: CliffordElement, data_qubits: int = 1, ancilla_qubits: int = 1,
                   restarts: int = 64, seed=0) -> SearchResult:
    """All ancilla states the Clifford ``elem`` reuses exactly, with their induced unitaries.

    The ancilla is the leading ``ancilla_qubits`` qubits of ``elem``.
    """
    if elem.num_qubits != data_qubits + ancilla_qubits:
        raise ValueError(f"element acts on {elem.num_qubits} qubits, "
                         f"expected {ancilla_qubits} ancilla + {data_qubits} data")
    u = elem.unitary()
    if ancilla_qubits == 0:
        return SearchResult(elem.canonical_id, [Solution(np.ones(1, dtype=complex), u, 0.0, _classify(u))],
                            best_residual=0.0)
    if ancilla_qubits == 1:
        return _solve_one_qubit_ancilla(u, elem.canonical_id)
    return _solve_generic(u, elem.canonical_id, ancilla_qubits, restarts, np.random.default_rng(seed))


def _solve_chunk(args):
    n, ids = args
    group = enumerate_group(n)
    data, anc = (1, 0) if n == 1 else (1, 1)
    return [solve_reusable(group[i], data_qubits=data, ancilla_qubits=anc) for i in ids]


S_ACTION = "X->+Y,Z->+Z"
H_ACTION = "X->+Z,Z->+X"


def s_composite_element() -> CliffordElement:
    """CNOT(data->anc), H(anc), CNOT(data->anc), H(anc) with the ancilla as qubit 0."""
    e = element_from_circuit(2, [gate("CNOT", 1, 0), gate("H", 0), gate("CNOT", 1, 0), gate("H", 0)])
    return group_index(2)[e.key]


def survey(n: int = 2, workers: int = 1) -> dict:
    """Solve every element of the n-qubit group and aggregate a JSON-ready report.

    ``n = 1`` treats each element as an ancilla-free body (the induced
    unitary is the element itself); ``n = 2`` uses one ancilla and one data
    qubit.
    """
    group = enumerate_group(n)
    ids = list(range(len(group)))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [(n, ids[i::workers]) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_solve_chunk, chunks) for r in part]
        results.sort(key=lambda r: r.clifford_id)
    else:
        results = _solve_chunk((n, ids))

    cls_hist: Counter = Counter()
    count_hist: Counter = Counter()
    distinct: Counter = Counter()
    families = []
    inconclusive = []
    h_elements, h_with_data_h = 0, 0
    s_type = []
    for res in results:
        count_hist[len(res.solutions) if res.family is None else res.family] += 1
        if res.inconclusive:
            inconclusive.append(res.clifford_id)
        if res.family:
            families.append({"clifford_id": res.clifford_id, "kind": res.family,
                             "representatives": [s.to_json() for s in res.solutions]})
        actions = set()
        for s in res.solutions:
            cls_hist[s.classification] += 1
            act = pauli_action(s.induced_unitary)
            actions.add(act)
            distinct[act] += 1
        if n == 2 and H_ACTION in actions:
            h_elements += 1
            if any(g.kind.value == "H" and g.targets == (1,) for g in group[res.clifford_id].witness_circuit):
                h_with_data_h += 1
        if S_ACTION in actions:
            s_type.append(res.clifford_id)
    report = {
        "schema": 1,
        "num_qubits": n,
        "ancilla_qubits": 0 if n == 1 else 1,
        "group_size": len(group),
        "expected_group_size": group_order(n),
        "solved": sum(1 for r in results if r.solutions),
        "no_solution": sum(1 for r in results if not r.solutions and not r.inconclusive),
        "inconclusive": inconclusive,
        "classification": {"clifford": cls_hist["clifford"], "non_clifford": cls_hist["non_clifford"]},
        "non_clifford_count": cls_hist["non_clifford"],
        "solution_count_histogram": {str(k): v for k, v in sorted(count_hist.items(), key=lambda t: str(t[0]))},
        "distinct_unitaries": sorted(distinct),
        "families": families,
        "s_type_elements": len(s_type),
        "h_type": {"elements": h_elements, "witness_has_data_H": h_with_data_h},
    }
    if n == 2:
        comp = s_composite_element()
        res = results[comp.canonical_id]
        report["s_composite"] = {
            "clifford_id": comp.canonical_id,
            "witness": [str(g) for g in comp.witness_circuit],
            "solutions": [s.to_json() for s in res.solutions],
            "s_type": any(pauli_action(s.induced_unitary) == S_ACTION for s in res.solutions),
        }
    return report


def save_group_cache(path, n: int):
    data = {
        str(e.canonical_id): {"action": [str(p) for p in e.symplectic_action],
                              "witness": [str(g) for g in e.witness_circuit]}
        for e in enumerate_group(n)
    }
    Path(path).write_text(json.dumps({"schema": 1, "num_qubits": n, "elements": data}, sort_keys=True))


def load_group_cache(path) -> dict[int, CliffordElement]:
    data = json.loads(Path(path).read_text())
    n = int(data["num_qubits"])
    out = {}
    for cid, item in data["elements"].items():
        gates = []
        for text in item["witness"]:
            tok = text.split()
            gates.append(gate(tok[0], *map(int, tok[1:])))
        e = element_from_circuit(n, gates)
        out[int(cid)] = CliffordElement(n, e.x, e.z, e.r, int(cid), e.witness_circuit)
    return out
