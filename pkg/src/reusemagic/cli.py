"""Command-line front end.

    reusemagic run CIRCUIT            exact outcome distribution
    reusemagic sample CIRCUIT         sampled shots
    reusemagic verify-gadget NAME     dense-oracle check of a gadget
    reusemagic search                 reusable-ancilla survey of a Clifford group
    reusemagic decompose STATE        Pauli and stabilizer-frame expansion
    reusemagic bench                  wall-time scaling tables

Exit status: 0 on success, 1 on invalid input or usage, 2 on internal error.
JSON output is canonical (sorted keys), so identical inputs and seeds give
identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .circuit import CircuitError, GadgetResolutionError, expand_gadgets, parse, validate
from .decomp import load_state, pauli_coefficients, stabilizer_frame
from .gadgets import builtin, default_library, load_gadget, verify_gadget
from .oracle import InvalidStateError, OracleLimitError
from .stabsum import MAX_EXACT_MEASUREMENTS, BranchOverflowError, NotExpandedError, exact_distribution, \
    init_from_expansion, run_sample

SCHEMA = 1
DEFAULT_SEED = 0
DEFAULT_SHOTS = 100


class UsageError(Exception):
    pass


VALIDATION_ERRORS = (UsageError, CircuitError, GadgetResolutionError, BranchOverflowError, InvalidStateError,
                     OracleLimitError, NotExpandedError, OSError, json.JSONDecodeError, KeyError, ValueError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="json", help="output format (default json)")

    gad = argparse.ArgumentParser(add_help=False)
    gad.add_argument("--gadget", action="append", default=[], metavar="NAME|PATH",
                     help="extra gadget definition (JSON file) or builtin name; repeatable")

    p = _Parser(prog="reusemagic", description="Stabilizer simulation and reusable-gadget analysis.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("run", parents=[fmt, gad], help="exact outcome distribution of a circuit file")
    s.add_argument("circuit", help="circuit text file")
    s.add_argument("--max-measurements", type=_positive, default=MAX_EXACT_MEASUREMENTS,
                   help=f"branch-enumeration cap (default {MAX_EXACT_MEASUREMENTS})")

    s = sub.add_parser("sample", parents=[fmt, gad], help="sample shots of a circuit file")
    s.add_argument("circuit", help="circuit text file")
    s.add_argument("--seed", type=_u64, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    s.add_argument("--shots", type=_positive, default=DEFAULT_SHOTS, help=f"number of shots (default {DEFAULT_SHOTS})")

    s = sub.add_parser("verify-gadget", parents=[fmt], help="check a gadget against its claimed unitary")
    s.add_argument("name", nargs="?", help="builtin gadget name or gadget JSON path")
    s.add_argument("--gadget", dest="gadget_opt", metavar="NAME|PATH", help="same as the positional argument")
    s.add_argument("--seed", type=_u64, default=DEFAULT_SEED, help=f"seed for random inputs (default {DEFAULT_SEED})")
    s.add_argument("--random-inputs", type=int, default=100, help="random pure inputs on top of the frame design")

    s = sub.add_parser("search", parents=[fmt], help="survey a Clifford group for reusable ancillas")
    s.add_argument("--qubits", type=int, choices=(1, 2), default=2, help="group size n (default 2)")
    s.add_argument("--workers", type=_positive, default=1, help="worker processes (default 1)")
    s.add_argument("--cache", metavar="PATH", help="also write the enumerated group to this JSON file")
    s.add_argument("--full", action="store_true", help="keep the per-family solution listing")

    s = sub.add_parser("decompose", parents=[fmt], help="Pauli and stabilizer-frame expansion of a state file")
    s.add_argument("state", help="JSON file: vector or matrix of [re, im] pairs")

    s = sub.add_parser("bench", parents=[fmt], help="scaling of the mixture sampler with n and with term count")
    s.add_argument("--sizes", type=_positive, nargs="+", default=[64, 128, 256, 512], help="data qubit counts")
    s.add_argument("--term-qubits", type=_positive, default=128, help="n for the term-count sweep")
    s.add_argument("--repeats", type=_positive, default=5, help="timing repeats (best of)")
    s.add_argument("--seed", type=_u64, default=DEFAULT_SEED, help=f"workload seed (default {DEFAULT_SEED})")
    return p


# -- commands -----------------------------------------------------------------


def _resolve_gadget(ref: str):
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        return load_gadget(path)
    return builtin(ref)


def _library(extra: Sequence[str]):
    lib = default_library()
    for ref in extra:
        g = _resolve_gadget(ref)
        lib[g.name] = g
    return lib


def _load_circuit(path: str):
    c = parse(Path(path).read_text())
    problems = validate(c)
    if problems:
        raise CircuitError("; ".join(str(d) for d in problems))
    return c


def _ancilla_json(ancillas):
    return [{"gadget": a.gadget, "qubits": list(a.qubits), "reusable": a.reusable} for a in ancillas]


def cmd_run(args) -> dict:
    c = _load_circuit(args.circuit)
    expanded, ancillas = expand_gadgets(c, _library(args.gadget))
    if expanded.measurement_count > args.max_measurements:
        raise BranchOverflowError(f"{expanded.measurement_count} measurements exceed --max-measurements "
                                  f"{args.max_measurements}")
    m = init_from_expansion(expanded, ancillas)
    dist = exact_distribution(m, max_measurements=args.max_measurements)
    marginals = {}
    for b in range(expanded.num_bits):
        p1 = float(sum(p for k, p in dist.items() if k[b] == "1"))
        marginals[f"c{b}"] = {"0": 1.0 - p1, "1": p1}
    return {
        "command": "run",
        "circuit": args.circuit,
        "num_qubits": expanded.num_qubits,
        "num_bits": expanded.num_bits,
        "ancillas": _ancilla_json(ancillas),
        "terms": m.num_terms,
        "distribution": dist,
        "marginals": marginals,
    }


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Independent stream per shot, so adding shots never changes earlier ones."""
    return np.random.default_rng(np.random.SeedSequence([seed, shot]))


def cmd_sample(args) -> dict:
    c = _load_circuit(args.circuit)
    expanded, ancillas = expand_gadgets(c, _library(args.gadget))
    m = init_from_expansion(expanded, ancillas)
    records = [run_sample(m, rng=shot_rng(args.seed, k)) for k in range(args.shots)]
    counts = Counter("".join(str(r[f"c{b}"]) for b in range(expanded.num_bits)) for r in records)
    return {
        "command": "sample",
        "circuit": args.circuit,
        "seed": args.seed,
        "shots": args.shots,
        "ancillas": _ancilla_json(ancillas),
        "records": records,
        "counts": dict(sorted(counts.items())),
    }


def cmd_verify(args) -> dict:
    ref = args.name or args.gadget_opt
    if not ref:
        raise UsageError("verify-gadget needs a gadget name or path")
    if args.random_inputs < 0:
        raise UsageError("--random-inputs must be >= 0")
    g = _resolve_gadget(ref)
    report = verify_gadget(g, n_random=args.random_inputs, seed=args.seed)
    return {"command": "verify-gadget", "seed": args.seed, "report": report.to_json()}


def cmd_search(args) -> dict:
    from .search import save_group_cache, survey

    report = survey(args.qubits, workers=args.workers)
    if not args.full:
        report["families"] = [{"clifford_id": f["clifford_id"], "kind": f["kind"]} for f in report["families"]]
    if args.cache:
        save_group_cache(args.cache, args.qubits)
        report["cache"] = args.cache
    report["command"] = "search"
    return report


def cmd_decompose(args) -> dict:
    state = load_state(json.loads(Path(args.state).read_text()))
    pauli = pauli_coefficients(state)
    frame = stabilizer_frame(pauli)
    return {
        "command": "decompose",
        "num_qubits": pauli.num_qubits,
        "pauli": {p.letters: c for p, c in pauli.coefficients.items()},
        "frame": frame.to_json()["terms"],
        "frame_terms": len(frame),
        "frame_weight_sum": frame.total_weight,
    }


def cmd_bench(args) -> dict:
    from .bench import run_bench

    report = run_bench(ns=args.sizes, term_n=args.term_qubits, repeats=args.repeats, seed=args.seed)
    report["command"] = "bench"
    return report


COMMANDS = {
    "run": cmd_run,
    "sample": cmd_sample,
    "verify-gadget": cmd_verify,
    "search": cmd_search,
    "decompose": cmd_decompose,
    "bench": cmd_bench,
}


def _text(report: dict) -> str:
    if report.get("command") == "bench":
        from .bench import format_table

        return format_table(report)
    lines = []

    def walk(prefix, obj):
        if isinstance(obj, dict) and obj:
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list) and obj and all(isinstance(v, dict) for v in obj):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {json.dumps(obj, sort_keys=True)}")

    walk("", report)
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = {"schema": SCHEMA, **COMMANDS[args.command](args)}
    except VALIDATION_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"reusemagic: error: {msg}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"reusemagic: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(_text(report) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
