"""Command-line driver: database generation, optimization, verification,
counting, and database inspection.

stdout carries machine-parsable `key: value` lines; human-oriented notes go
to stderr. Exit codes: 0 success, 1 verify mismatch, 2 bad configuration or
input, 3 resource guard, 4 post-optimization residual over tolerance.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import database, generator, optimizer, qasm
from .circuit import effective_depth
from .gates import (
    BUILTIN_GATES,
    CX,
    AngleExpr,
    GateSet,
    I,
    gate_from_name,
    instantiate_param_gate,
)
from .gates import U1 as U1_TMPL
from .gates import U2 as U2_TMPL
from .gates import U3 as U3_TMPL
from .matrices import max_abs_diff

MAX_CIRCUITS_ENV = "QUANTO_MAX_CIRCUITS"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_RESIDUAL = 4


def _pi(num, den=1) -> AngleExpr:
    return AngleExpr(pi_coeff=Fraction(num, den))


def _preset_ibm_legacy() -> list:
    u1_angles = [_pi(1), _pi(1, 2), _pi(-1, 2), _pi(1, 4), _pi(-1, 4)]
    gates = [I]
    gates += [instantiate_param_gate(U1_TMPL, [a]) for a in u1_angles]
    gates.append(instantiate_param_gate(U2_TMPL, [_pi(0), _pi(1)]))
    gates.append(instantiate_param_gate(U3_TMPL, [_pi(1), _pi(0), _pi(1)]))
    gates.append(CX)
    return gates


PRESETS: dict[str, callable] = {
    "standard": lambda: [BUILTIN_GATES[n] for n in
                         ("I", "X", "Y", "Z", "H", "S", "SDG", "T", "TDG", "CX")],
    "ibm-legacy": _preset_ibm_legacy,
}


def parse_gate_set(spec: str) -> GateSet:
    """Comma-separated gate names, or a preset id."""
    if spec in PRESETS:
        return GateSet(PRESETS[spec]())
    names = [tok.strip() for tok in spec.split(",") if tok.strip()]
    if not names:
        raise ValueError("empty gate list")
    gates = [gate_from_name(name) for name in names]
    if not any(g.is_identity for g in gates):
        gates.insert(0, I)
    return GateSet(gates)


def _out(key: str, value) -> None:
    print(f"{key}: {value}")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _max_circuits() -> int:
    raw = os.environ.get(MAX_CIRCUITS_ENV)
    if raw is None:
        return generator.DEFAULT_MAX_CIRCUITS
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{MAX_CIRCUITS_ENV} must be an integer, got {raw!r}")


def cmd_gen_db(args) -> int:
    try:
        gs = parse_gate_set(args.gates)
        cfg = generator.GeneratorConfig(
            n=args.qubits,
            d=args.depth,
            gate_set=gs,
            dp=args.dp,
            neighbors_only=args.neighbors_only,
            allow_large=args.allow_large,
            max_circuits=_max_circuits(),
        )
    except ValueError as e:
        _note(f"error: {e}")
        return EXIT_CONFIG
    try:
        db = generator.build_database(cfg)
    except generator.ResourceGuardError as e:
        _note(f"error: {e}")
        return EXIT_RESOURCE
    database.save(db, args.out)
    _out("circuits", db.total_circuits)
    _out("fingerprints", len(db.by_fingerprint))
    hist: dict[int, int] = {}
    for encs in db.by_fingerprint.values():
        hist[len(encs)] = hist.get(len(encs), 0) + 1
    for size in sorted(hist):
        _out(f"buckets_of_size_{size}", hist[size])
    _out("out", args.out)
    return EXIT_OK


def _load_or_build_db(args, grid) -> database.IdentityDatabase:
    if args.db is not None:
        return database.load(args.db)
    # combined generate-and-optimize path; detect gates when not given
    if args.gates is not None:
        gs = parse_gate_set(args.gates)
    else:
        seen: dict[str, object] = {}
        for layer in grid.layers:
            for cell in layer:
                seen.setdefault(cell.gate.name, cell.gate)
        gates = list(seen.values())
        if not any(g.is_identity for g in gates):
            gates.insert(0, I)
        gs = GateSet(gates)
        _note(f"auto-detected gate set: {', '.join(g.name for g in gs.gates)}")
    cfg = generator.GeneratorConfig(
        n=args.qubits if args.qubits is not None else min(grid.n, 3),
        d=args.depth,
        gate_set=gs,
        dp=args.dp,
        neighbors_only=args.neighbors_only,
        max_circuits=_max_circuits(),
    )
    return generator.build_database(cfg)


def cmd_optimize(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            grid = qasm.parse(fh.read())
    except (OSError, ValueError) as e:
        _note(f"error: {e}")
        return EXIT_CONFIG
    try:
        db = _load_or_build_db(args, grid)
    except generator.ResourceGuardError as e:
        _note(f"error: {e}")
        return EXIT_RESOURCE
    except (OSError, ValueError) as e:
        _note(f"error: {e}")
        return EXIT_CONFIG

    spec = optimizer.TileSpec(
        args.tile_qubits if args.tile_qubits is not None else db.meta.n,
        args.tile_depth if args.tile_depth is not None else db.meta.d,
    )
    try:
        result, report = optimizer.optimize(
            grid, db, spec, iters=args.iterations, neighbors_only=args.neighbors_only
        )
    except ValueError as e:
        _note(f"error: {e}")
        return EXIT_CONFIG

    text = qasm.emit(result)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _out("out", args.out)
    else:
        sys.stdout.write(text)

    _out("initial_depth", report.initial_depth)
    _out("final_depth", report.final_depth)
    _out("substitutions", len(report.substitutions))
    _out("iterations", report.iterations)
    _out("collisions_skipped", report.collisions_skipped)
    _out("residual", f"{report.residual:.3e}")
    if report.residual > args.tolerance:
        _note(
            f"warning: residual {report.residual:.3e} exceeds tolerance "
            f"{args.tolerance:.3e}; output written but flagged"
        )
        return EXIT_RESIDUAL
    return EXIT_OK


def cmd_verify(args) -> int:
    grids = []
    for path in (args.a, args.b):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                grids.append(qasm.parse(fh.read()))
        except (OSError, ValueError) as e:
            _note(f"error: {path}: {e}")
            return EXIT_CONFIG
    if grids[0].n != grids[1].n:
        _note(f"error: qubit counts differ ({grids[0].n} vs {grids[1].n})")
        return EXIT_CONFIG
    from .circuit import circuit_unitary

    residual = max_abs_diff(circuit_unitary(grids[0]), circuit_unitary(grids[1]))
    _out("residual", f"{residual:.3e}")
    _out("equal", "true" if residual <= args.tolerance else "false")
    return EXIT_OK if residual <= args.tolerance else EXIT_VERIFY_FAILED


def cmd_count(args) -> int:
    try:
        per_layer = generator.scaling_count(args.qubits, 1, args.g, args.t)
        total = generator.scaling_count(args.qubits, args.depth, args.g, args.t)
    except ValueError as e:
        _note(f"error: {e}")
        return EXIT_CONFIG
    _out("layer_circuits", per_layer)
    _out("total_circuits", total)
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        db = database.load(args.db)
    except (OSError, database.DatabaseFormatError) as e:
        _note(f"error: {e}")
        return EXIT_CONFIG
    meta = db.meta
    _out("format", meta.format_version)
    _out("digest", meta.digest_algorithm)
    _out("convention", meta.convention)
    _out("n", meta.n)
    _out("d", meta.d)
    _out("dp", meta.dp)
    _out("neighbors_only", "true" if meta.neighbors_only else "false")
    _out("gates", ",".join(g.name for g in meta.gate_set.gates))
    _out("circuits", db.total_circuits)
    _out("buckets", len(db.by_fingerprint))
    largest = max(db.by_fingerprint.values(), key=len, default=[])
    _out("largest_bucket", len(largest))
    example = next(
        (
            encs
            for fp, encs in sorted(db.by_fingerprint.items(), key=lambda kv: kv[0].hex)
            if len(encs) > 1
        ),
        None,
    )
    if example is not None:
        _out("example_identity", f"{example[0]} == {example[1]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qidopt",
        description="Quantum-circuit superoptimizer: identity databases and "
        "tile-based depth reduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-db", help="enumerate circuits and write a QIDB file")
    p.add_argument("--gates", required=True, help="comma-separated names or a preset "
                   f"({', '.join(PRESETS)})")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--dp", type=int, default=8, help="decimal precision (default 8)")
    p.add_argument("--neighbors-only", action="store_true")
    p.add_argument("--allow-large", action="store_true",
                   help="lift the practical n/d bounds")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_db)

    p = sub.add_parser("optimize", help="optimize a QASM circuit against a database")
    p.add_argument("input", help="input QASM file")
    p.add_argument("--db", help="QIDB file; omit to generate one on the fly")
    p.add_argument("--gates", help="gate set for on-the-fly generation "
                   "(default: auto-detect from the input)")
    p.add_argument("--qubits", type=int, help="identity qubits for on-the-fly "
                   "generation (default: min(input, 3))")
    p.add_argument("--depth", type=int, default=3,
                   help="identity depth for on-the-fly generation (default 3)")
    p.add_argument("--dp", type=int, default=8)
    p.add_argument("--tile-qubits", type=int, help="tile height (default: db n)")
    p.add_argument("--tile-depth", type=int, help="tile width (default: db d)")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--neighbors-only", action="store_true")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--out", help="output QASM file (default: stdout)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="compare the unitaries of two QASM files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="evaluate the enumeration-size formula")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--g", type=int, required=True,
                   help="arity-1 gate count, Identity included")
    p.add_argument("--t", type=int, required=True, help="arity-2 gate count")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("stats", help="inspect a QIDB file")
    p.add_argument("db")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except ValueError as e:
        _note(f"error: {e}")
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())
