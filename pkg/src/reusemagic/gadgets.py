"""Teleportation gadgets as data, and a dense-oracle verifier.

A gadget body acts on the ancilla register first (qubits ``0..q-1``) and the
data qubits after it. Induced unitaries are compared up to global phase.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .circuit import Circuit, Conditional, Measure, Reset, parse, render
from .decomp import dump_state, load_state
from .oracle import (
    T_MATRIX,
    channel_of_circuit,
    check_density,
    check_state,
    frame_design,
    gate_matrix,
    num_qubits_of,
    process_fidelity,
    random_statevector,
    distribution,
    trace_distance,
    _run_branches,
    DEFAULT_UNITARIES,
)
from .pauli import CliffordGate, GateKind, gate

PASS_TOL = 1e-10

_s2 = 1 / np.sqrt(2)
PI_2_STATE = np.array([_s2, 1j * _s2])  # (|0> + i|1>)/sqrt2
PI_4_STATE = np.array([_s2, np.exp(1j * np.pi / 4) * _s2])
S_MATRIX = gate_matrix(GateKind.S)
H_MATRIX = gate_matrix(GateKind.H)
SQRT_X_MATRIX = H_MATRIX @ S_MATRIX @ H_MATRIX
SQRT_Y_MATRIX = 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]])


@dataclass(frozen=True)
class GadgetDef:
    name: str
    ancilla_qubits: int
    ancilla_state: np.ndarray = field(repr=False)
    body: Circuit = field(repr=False)
    claimed_unitary: np.ndarray = field(repr=False)
    reusable: bool = True

    def __post_init__(self):
        state = np.asarray(self.ancilla_state, dtype=complex)
        state = check_state(state) if state.ndim == 1 else check_density(state)
        if num_qubits_of(state.shape[0]) != self.ancilla_qubits:
            raise ValueError(f"{self.name}: ancilla state does not match {self.ancilla_qubits} qubit(s)")
        object.__setattr__(self, "ancilla_state", state)
        u = np.asarray(self.claimed_unitary, dtype=complex)
        if u.shape != (2 ** self.data_qubits,) * 2 or not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10):
            raise ValueError(f"{self.name}: claimed unitary must be a unitary on {self.data_qubits} data qubit(s)")
        object.__setattr__(self, "claimed_unitary", u)
        if self.data_qubits < 1:
            raise ValueError(f"{self.name}: body has no data qubits")
        if not self.body.is_clifford:
            raise ValueError(f"{self.name}: gadget body must be Clifford-only")
        if self.reusable:
            for inst in self.body.instructions:
                if isinstance(inst, (Measure, Reset)) and inst.qubit < self.ancilla_qubits:
                    raise ValueError(f"{self.name}: reusable gadgets may not measure or reset the ancilla")

    @property
    def data_qubits(self) -> int:
        return self.body.num_qubits - self.ancilla_qubits

    @property
    def ancilla_density(self) -> np.ndarray:
        s = self.ancilla_state
        return np.outer(s, s.conj()) if s.ndim == 1 else s

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ancilla_qubits": self.ancilla_qubits,
            "ancilla_state": dump_state(self.ancilla_state),
            "body": render(self.body),
            "claimed_unitary": dump_state(self.claimed_unitary),
            "reusable": self.reusable,
        }


def gadget_from_json(data: Union[str, dict]) -> GadgetDef:
    data = json.loads(data) if isinstance(data, str) else data
    return GadgetDef(
        name=str(data["name"]),
        ancilla_qubits=int(data["ancilla_qubits"]),
        ancilla_state=load_state(data["ancilla_state"]),
        body=parse(data["body"]),
        claimed_unitary=load_state(data["claimed_unitary"]),
        reusable=bool(data["reusable"]),
    )


def load_gadget(path) -> GadgetDef:
    return gadget_from_json(Path(path).read_text())


# -- builtins ---------------------------------------------------------------

# ancilla = qubit 0, data = qubit 1
_S_BODY = [gate("CNOT", 1, 0), gate("H", 0), gate("CNOT", 1, 0), gate("H", 0)]
_SX_BODY = [gate("H", 1), *_S_BODY, gate("H", 1)]


def _s_reusable():
    return GadgetDef("S_reusable", 1, PI_2_STATE, Circuit(2, 0, _S_BODY), S_MATRIX, True)


def _sqrt_x_reusable():
    return GadgetDef("SqrtX_reusable", 1, PI_2_STATE, Circuit(2, 0, _SX_BODY), SQRT_X_MATRIX, True)


def _sqrt_y_reusable():
    # sqrt(Y) ~ S sqrt(X) S^dagger, with S^dagger = S^3: three S bodies,
    # the sqrt(X) body, then one more S body, all on the same ancilla.
    body = _S_BODY * 3 + _SX_BODY + _S_BODY
    return GadgetDef("SqrtY_reusable", 1, PI_2_STATE, Circuit(2, 0, body), SQRT_Y_MATRIX, True)


def _t_inject():
    body = Circuit(2, 1, [gate("CNOT", 1, 0), Measure(0, 0), Conditional(0, gate("S", 1))])
    return GadgetDef("T_inject", 1, PI_4_STATE, body, T_MATRIX, False)


_BUILTINS = {
    "S_reusable": _s_reusable,
    "SqrtX_reusable": _sqrt_x_reusable,
    "SqrtY_reusable": _sqrt_y_reusable,
    "T_inject": _t_inject,
}
ALIASES = {"T": "T_inject"}


def builtin(name: str) -> GadgetDef:
    try:
        return _BUILTINS[ALIASES.get(name, name)]()
    except KeyError:
        raise KeyError(f"unknown gadget {name!r}; builtins are {sorted(_BUILTINS)}") from None


def builtin_names() -> list[str]:
    return sorted(_BUILTINS)


def default_library() -> dict[str, GadgetDef]:
    lib = {name: make() for name, make in _BUILTINS.items()}
    for alias, target in ALIASES.items():
        lib[alias] = lib[target]
    return lib


# -- verification -----------------------------------------------------------


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    d = a.shape[0]
    return abs(abs(np.trace(a.conj().T @ b)) / d - 1) <= tol


def _uses_target_gate(g: GadgetDef) -> bool:
    """True when the body contains a gate equal (up to phase) to the one it claims to implement."""
    if g.data_qubits != 1:
        return False
    kinds = {k for k in GateKind if k.arity == 1 and equal_up_to_phase(gate_matrix(k), g.claimed_unitary)}
    kinds |= {k.inverse for k in kinds}
    for inst in g.body.instructions:
        gg = inst.gate if isinstance(inst, Conditional) else inst
        if isinstance(gg, CliffordGate) and gg.kind in kinds:
            return True
    return False


def _fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    vals, vecs = np.linalg.eigh(rho)
    if np.sum(vals > 1e-12) == 1:
        v = vecs[:, -1]
        return float(np.real(np.vdot(v, sigma @ v)))
    sr = scipy.linalg.sqrtm(rho)
    return float(np.real(np.trace(scipy.linalg.sqrtm(sr @ sigma @ sr))) ** 2)


@dataclass
class GadgetReport:
    name: str
    reusable: bool
    unitary_match: float
    ancilla_restored: Optional[float]
    leakage: Optional[float]
    branch_fidelities: Optional[dict] = None
    branch_probability_range: Optional[dict] = None
    uses_target_gate: bool = False
    inputs_tested: int = 0
    passed: bool = False

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "reusable": self.reusable,
            "unitary_match": self.unitary_match,
            "ancilla_restored": self.ancilla_restored,
            "leakage": self.leakage,
            "branch_fidelities": self.branch_fidelities,
            "branch_probability_range": self.branch_probability_range,
            "uses_target_gate": self.uses_target_gate,
            "inputs_tested": self.inputs_tested,
            "passed": self.passed,
        }


def _inputs(d: int, n_random: int, seed) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return frame_design(d) + [random_statevector(d, rng) for _ in range(n_random)]


def verify_gadget(g: GadgetDef, n_random: int = 100, seed=0, tol: float = PASS_TOL) -> GadgetReport:
    """Check a gadget against its claimed unitary with the dense oracle.

    The data channel is extracted as a Choi matrix with the ancilla traced
    out. Reusable gadgets are also run on every input of the frame design
    plus ``n_random`` random pure inputs, recording the worst ancilla
    fidelity and the worst leakage (``1 -`` largest squared Schmidt
    coefficient of the ancilla/data output; for a mixed ancilla, the trace
    distance of the output from the product of its marginals). Consumable
    gadgets report per-branch process fidelities and the range of each
    branch probability over the same inputs.
    """
    q, d = g.ancilla_qubits, g.data_qubits
    data = list(range(q, q + d))
    u = g.claimed_unitary
    choi = channel_of_circuit(g.body, data, env_state=g.ancilla_state)
    report = GadgetReport(g.name, g.reusable, process_fidelity(choi, u), None, None,
                          uses_target_gate=_uses_target_gate(g))
    inputs = _inputs(d, n_random, seed)
    report.inputs_tested = len(inputs)
    n = q + d
    if g.reusable:
        anc = g.ancilla_density
        pure = np.linalg.matrix_rank(anc, tol=1e-10) == 1
        vals, vecs = np.linalg.eigh(anc)
        ens = [(w, vecs[:, k]) for k, w in enumerate(vals) if w > 1e-15]
        worst_restore, worst_leak = 1.0, 0.0
        for psi in inputs:
            rho_out = np.zeros((2 ** n, 2 ** n), dtype=complex)
            for w, m in ens:
                (s, _), = _run_branches(g.body, np.kron(m, psi).reshape([2] * n), DEFAULT_UNITARIES)
                v = s.reshape(-1)
                rho_out += w * np.outer(v, v.conj())
                if pure:
                    sv = np.linalg.svd(v.reshape(2 ** q, 2 ** d), compute_uv=False)
                    worst_leak = max(worst_leak, 1 - sv[0] ** 2)
            t = rho_out.reshape(2 ** q, 2 ** d, 2 ** q, 2 ** d)
            rho_a = np.einsum("ajbj->ab", t)
            rho_d = np.einsum("jajb->ab", t)
            worst_restore = min(worst_restore, _fidelity(anc, rho_a))
            if not pure:
                worst_leak = max(worst_leak, trace_distance(rho_out, np.kron(rho_a, rho_d)))
        report.ancilla_restored = worst_restore
        report.leakage = float(max(worst_leak, 0.0))
        report.passed = bool(report.unitary_match >= 1 - tol and worst_restore >= 1 - tol
                         and report.leakage <= tol)
    else:
        per = channel_of_circuit(g.body, data, env_state=g.ancilla_state, per_branch=True)
        dd = 2 ** d
        report.branch_fidelities = {
            k: process_fidelity(j * dd / np.trace(j).real, u) for k, j in per.items()
        }
        dists = []
        for psi in inputs:
            joint = np.kron(g.ancilla_density, np.outer(psi, psi.conj()))
            dists.append(distribution(g.body, rho_ancilla=joint, placement=list(range(n))))
        keys = sorted(set().union(*dists))
        report.branch_probability_range = {
            k: [min(dd_.get(k, 0.0) for dd_ in dists), max(dd_.get(k, 0.0) for dd_ in dists)] for k in keys
        }
        report.passed = bool(report.unitary_match >= 1 - tol) and all(
            f >= 1 - tol for f in report.branch_fidelities.values())
    return report
