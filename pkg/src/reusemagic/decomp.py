"""Pauli-basis and stabilizer-frame expansions of small density matrices.

Coefficients follow the trace formula ``c_P = Tr(P rho) / 2**q``, so
``rho = sum_P c_P P`` with real ``c_P`` for Hermitian ``rho``. Each Pauli
letter then splits into a signed pair of frame projectors::

    I = |0><0| + |1><1|      X = |+><+| - |-><-|
    Y = |i><i| - |-i><-i|    Z = |0><0| - |1><1|

and the products are collected over the ``6**q`` frame labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .oracle import check_density, num_qubits_of
from .pauli import PauliString, all_paulis
from .tableau import FrameLabel

MAX_ANCILLA_QUBITS = 3
PRUNE = 1e-13

_SPLIT = {
    "I": ((1.0, FrameLabel.Z_PLUS), (1.0, FrameLabel.Z_MINUS)),
    "X": ((1.0, FrameLabel.X_PLUS), (-1.0, FrameLabel.X_MINUS)),
    "Y": ((1.0, FrameLabel.Y_PLUS), (-1.0, FrameLabel.Y_MINUS)),
    "Z": ((1.0, FrameLabel.Z_PLUS), (-1.0, FrameLabel.Z_MINUS)),
}


@dataclass(frozen=True)
class PauliDecomposition:
    num_qubits: int
    coefficients: dict  # phase-free PauliString -> float

    def __getitem__(self, label: str) -> float:
        return self.coefficients.get(PauliString.from_label(label), 0.0)

    def nonzero(self, tol: float = 0.0) -> dict[str, float]:
        return {p.letters: c for p, c in self.coefficients.items() if abs(c) > tol}

    def to_json(self) -> dict:
        return {
            "kind": "pauli",
            "num_qubits": self.num_qubits,
            "coefficients": {str(p): float(c) for p, c in self.coefficients.items()},
        }


@dataclass(frozen=True)
class StabFrameDecomposition:
    num_qubits: int
    terms: tuple  # ((weight, (FrameLabel, ...)), ...)

    def __len__(self):
        return len(self.terms)

    @property
    def total_weight(self) -> float:
        return float(sum(w for w, _ in self.terms))

    def weight_of(self, *labels) -> float:
        key = tuple(FrameLabel(v) if not isinstance(v, FrameLabel) else v for v in labels)
        return sum(w for w, lab in self.terms if lab == key)

    def to_json(self) -> dict:
        return {
            "kind": "frame",
            "num_qubits": self.num_qubits,
            "terms": [{"weight": float(w), "labels": [lab.value for lab in labs]} for w, labs in self.terms],
        }


def pauli_coefficients(rho: np.ndarray) -> PauliDecomposition:
    """Hilbert-Schmidt coefficients of ``rho`` over all phase-free Pauli strings."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    rho = check_density(rho)
    q = num_qubits_of(rho.shape[0])
    if q > MAX_ANCILLA_QUBITS:
        raise ValueError(f"ancilla decompositions are limited to {MAX_ANCILLA_QUBITS} qubits")
    coeffs = {}
    for p in all_paulis(q):
        c = np.trace(p.to_matrix() @ rho) / 2 ** q
        if abs(c.imag) > 1e-12:
            raise ValueError(f"complex coefficient for {p}: matrix is not Hermitian")
        coeffs[p] = float(c.real)
    return PauliDecomposition(q, coeffs)


def stabilizer_frame(decomp: PauliDecomposition) -> StabFrameDecomposition:
    """Signed mixture over frame product states reproducing the same matrix."""
    acc: dict[tuple, float] = {}
    for p, c in decomp.coefficients.items():
        if c == 0.0:
            continue
        parts = [((c, ()))]
        for letter in p.letters:
            parts = [(w * s, labs + (lab,)) for w, labs in parts for s, lab in _SPLIT[letter]]
        for w, labs in parts:
            acc[labs] = acc.get(labs, 0.0) + w
    order = {lab: i for i, lab in enumerate(FrameLabel)}
    terms = sorted(
        ((w, labs) for labs, w in acc.items() if abs(w) >= PRUNE),
        key=lambda t: [order[lab] for lab in t[1]],
    )
    return StabFrameDecomposition(decomp.num_qubits, tuple(terms))


def decompose(rho: np.ndarray) -> StabFrameDecomposition:
    return stabilizer_frame(pauli_coefficients(rho))


def frame_projector(labels) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for lab in labels:
        out = np.kron(out, lab.projector())
    return out


def reconstruct(d: Union[PauliDecomposition, StabFrameDecomposition]) -> np.ndarray:
    q = d.num_qubits
    out = np.zeros((2 ** q, 2 ** q), dtype=complex)
    if isinstance(d, PauliDecomposition):
        for p, c in d.coefficients.items():
            out += c * p.to_matrix()
    else:
        for w, labs in d.terms:
            out += w * frame_projector(labs)
    return out


def to_json(d: Union[PauliDecomposition, StabFrameDecomposition]) -> str:
    return json.dumps(d.to_json(), sort_keys=True)


def from_json(text: Union[str, dict]) -> Union[PauliDecomposition, StabFrameDecomposition]:
    data = json.loads(text) if isinstance(text, str) else text
    if data["kind"] == "pauli":
        coeffs = {PauliString.from_label(k): float(v) for k, v in data["coefficients"].items()}
        return PauliDecomposition(int(data["num_qubits"]), coeffs)
    if data["kind"] == "frame":
        terms = tuple(
            (float(t["weight"]), tuple(FrameLabel(v) for v in t["labels"])) for t in data["terms"]
        )
        return StabFrameDecomposition(int(data["num_qubits"]), terms)
    raise ValueError(f"unknown decomposition kind {data['kind']!r}")


def load_state(obj) -> np.ndarray:
    """State file contents: a vector of ``[re, im]`` pairs or a matrix of them."""
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def dump_state(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()
