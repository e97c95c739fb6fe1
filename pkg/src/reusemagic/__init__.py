"""Stabilizer simulation and reusable-ancilla gadget analysis.

Modules:

* :mod:`~reusemagic.pauli`    phased Pauli strings and Clifford gates
* :mod:`~reusemagic.tableau`  destabilizer tableau simulation
* :mod:`~reusemagic.circuit`  circuit IR, text format and gadget expansion
* :mod:`~reusemagic.oracle`   dense statevector reference
* :mod:`~reusemagic.decomp`   Pauli / stabilizer-frame expansions of ancillas
* :mod:`~reusemagic.stabsum`  signed stabilizer-mixture simulator
* :mod:`~reusemagic.gadgets`  gadget library and verifier
* :mod:`~reusemagic.search`   Clifford-group survey for reusable ancillas
"""

__version__ = "0.1.0"

from .circuit import Circuit, expand_gadgets, parse, render, validate
from .decomp import decompose, pauli_coefficients, reconstruct, stabilizer_frame
from .gadgets import GadgetDef, builtin, verify_gadget
from .pauli import CliffordGate, GateKind, PauliString, gate
from .stabsum import exact_distribution, init, init_from_expansion, run_sample
from .tableau import FrameLabel, Tableau

__all__ = [
    "Circuit", "CliffordGate", "FrameLabel", "GadgetDef", "GateKind", "PauliString", "Tableau",
    "builtin", "decompose", "exact_distribution", "expand_gadgets", "gate", "init", "init_from_expansion",
    "parse", "pauli_coefficients", "reconstruct", "render", "run_sample", "stabilizer_frame", "validate",
    "verify_gadget",
]
