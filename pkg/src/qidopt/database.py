"""The identity database: circuit encodings, the two lookup tables, and
the QIDB/1 file format.

Encoding: layers joined by '|', cells by ','. A single-qubit cell is the
gate name; a two-qubit half is NAME:C:p or NAME:T:p with p the partner
qubit index. Example (3 layers, 2 qubits):

    H,H|CX:C:1,CX:T:0|H,H

QIDB/1 files are UTF-8 text: a header block (format tag, digest algorithm,
product-convention tag, n/d/dp/neighbors_only, one line per gate with its
dp-rounded matrix), a body of buckets in fingerprint-hex order, and an
END footer carrying the circuit count and an MD5 checksum of the body.
Same database -> same bytes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .circuit import (
    FIRST,
    SECOND,
    Cell,
    CircuitGrid,
    half,
    single,
    validate,
)
from .fingerprint import DIGEST_ALGORITHM, Fingerprint, canonicalize
from .gates import BUILTIN_GATES, GateDef, GateSet, make_gate
from .matrices import max_abs_diff

FORMAT_VERSION = "QIDB/1"
CONVENTION = "temporal-right"  # first layer rightmost in the matrix product


class DatabaseFormatError(ValueError):
    """Base class for malformed database files."""


class VersionMismatchError(DatabaseFormatError):
    pass


class DigestMismatchError(DatabaseFormatError):
    pass


class TruncatedFileError(DatabaseFormatError):
    pass


class ChecksumMismatchError(DatabaseFormatError):
    pass


# ── circuit encodings ───────────────────────────────────────────────

def encode_cell(cell: Cell) -> str:
    if cell.is_single:
        return cell.gate.name
    return f"{cell.gate.name}:{cell.role}:{cell.partner}"


def encode_circuit(c: CircuitGrid) -> str:
    return "|".join(",".join(encode_cell(cell) for cell in layer) for layer in c.layers)


def encoding_effective_depth(enc: str, identity_name: str) -> int:
    """Effective depth straight off the encoding text (no decode)."""
    if not enc:
        return 0
    return sum(
        1
        for layer in enc.split("|")
        if any(tok != identity_name for tok in layer.split(","))
    )


def encoding_gate_cells(enc: str, identity_name: str) -> int:
    """Number of non-Identity cells in an encoding."""
    if not enc:
        return 0
    return sum(
        1
        for layer in enc.split("|")
        for tok in layer.split(",")
        if tok != identity_name
    )


def decode_circuit(enc: str, gate_set: GateSet) -> CircuitGrid:
    """Inverse of encode_circuit over the given gate set.

    Raises ValueError on unknown gates or malformed/unpaired grids.
    """
    if not enc:
        raise ValueError("empty circuit encoding")
    layers = []
    n = None
    for layer_text in enc.split("|"):
        cells = []
        for tok in layer_text.split(","):
            if ":" in tok:
                fields = tok.split(":")
                if len(fields) != 3 or fields[1] not in (FIRST, SECOND):
                    raise ValueError(f"malformed cell token {tok!r}")
                name, role, partner = fields
                cells.append(half(gate_set.by_name(name), role, int(partner)))
            else:
                cells.append(single(gate_set.by_name(tok)))
        if n is None:
            n = len(cells)
        elif len(cells) != n:
            raise ValueError("ragged circuit encoding")
        layers.append(tuple(cells))
    grid = CircuitGrid(n, tuple(layers))
    problems = validate(grid)
    if problems:
        raise ValueError(f"invalid circuit encoding: {problems[0]}")
    return grid


# ── the database ────────────────────────────────────────────────────

@dataclass(frozen=True)
class DatabaseMeta:
    n: int
    d: int
    dp: int
    neighbors_only: bool
    gate_set: GateSet
    format_version: str = FORMAT_VERSION
    digest_algorithm: str = DIGEST_ALGORITHM
    convention: str = CONVENTION


@dataclass
class IdentityDatabase:
    """Two hash tables over one enumeration: encoding -> fingerprint, and
    fingerprint -> cost-sorted equivalent encodings."""

    meta: DatabaseMeta
    by_circuit: dict[str, Fingerprint] = field(default_factory=dict)
    by_fingerprint: dict[Fingerprint, list[str]] = field(default_factory=dict)

    @property
    def total_circuits(self) -> int:
        return len(self.by_circuit)

    def bucket(self, fp: Fingerprint) -> list[str]:
        return self.by_fingerprint.get(fp, [])

    def decode(self, enc: str) -> CircuitGrid:
        return decode_circuit(enc, self.meta.gate_set)


# ── persistence ─────────────────────────────────────────────────────

def _gate_line(gate: GateDef, dp: int) -> str:
    return f"gate {gate.name} {gate.arity} {canonicalize(gate.matrix, dp)}"


def _parse_gate_line(line: str, dp: int) -> GateDef:
    fields = line.split(" ")
    if len(fields) != 4 or fields[0] != "gate":
        raise DatabaseFormatError(f"malformed gate line: {line!r}")
    name, arity, canon = fields[1], int(fields[2]), fields[3]
    toks = canon.split(";")
    dim = int(toks[0])
    if len(toks) != dim * dim + 1:
        raise DatabaseFormatError(f"gate {name}: bad matrix payload")
    entries = []
    for tok in toks[1:]:
        re_s, im_s = tok.split(",")
        entries.append(complex(float(re_s), float(im_s)))
    rows = [entries[r * dim : (r + 1) * dim] for r in range(dim)]
    # dp-rounded matrices cannot meet the registration tolerance; scale it.
    tol = max(1e-10, 4.0 * dim * 10.0**-dp)
    gate = make_gate(name, rows, arity=arity, tol=tol)
    return _attach_qasm_rendering(gate)


def _attach_qasm_rendering(gate: GateDef) -> GateDef:
    """Re-derive QASM emission info lost by the (name, arity, matrix) format."""
    builtin = BUILTIN_GATES.get(gate.name)
    if builtin is not None and builtin.arity == gate.arity:
        return GateDef(gate.name, gate.arity, gate.matrix, builtin.qasm_name)
    from .gates import _PARAM_NAME_RE, gate_from_name

    if _PARAM_NAME_RE.match(gate.name):
        fresh = gate_from_name(gate.name)
        return GateDef(
            gate.name, gate.arity, gate.matrix, None, fresh.template, fresh.angles
        )
    return gate


def dumps(db: IdentityDatabase) -> str:
    meta = db.meta
    header = [
        FORMAT_VERSION,
        f"digest {meta.digest_algorithm}",
        f"convention {meta.convention}",
        f"n {meta.n}",
        f"d {meta.d}",
        f"dp {meta.dp}",
        f"neighbors_only {'true' if meta.neighbors_only else 'false'}",
        f"gates {len(meta.gate_set.gates)}",
    ]
    header.extend(_gate_line(g, meta.dp) for g in meta.gate_set.gates)

    body_lines: list[str] = []
    for fp in sorted(db.by_fingerprint, key=lambda f: f.hex):
        encs = db.by_fingerprint[fp]
        body_lines.append(f"FP {fp.hex} {len(encs)}")
        body_lines.extend(encs)
    body = "".join(line + "\n" for line in body_lines)
    checksum = hashlib.md5(body.encode("utf-8")).hexdigest()
    footer = f"END {db.total_circuits} {checksum}\n"
    return "".join(line + "\n" for line in header) + body + footer


def save(db: IdentityDatabase, path) -> None:
    data = dumps(db)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)


def _header_value(lines: list[str], idx: int, key: str) -> str:
    if idx >= len(lines):
        raise TruncatedFileError(f"missing {key} header line")
    parts = lines[idx].split(" ", 1)
    if parts[0] != key or len(parts) != 2:
        raise DatabaseFormatError(f"expected '{key} ...' header, got {lines[idx]!r}")
    return parts[1]


def loads(text: str) -> IdentityDatabase:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TruncatedFileError("empty database file")
    if lines[0] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported format {lines[0]!r}, expected {FORMAT_VERSION}"
        )
    digest = _header_value(lines, 1, "digest")
    if digest != DIGEST_ALGORITHM:
        raise DigestMismatchError(
            f"digest algorithm {digest!r}, expected {DIGEST_ALGORITHM}"
        )
    convention = _header_value(lines, 2, "convention")
    n = int(_header_value(lines, 3, "n"))
    d = int(_header_value(lines, 4, "d"))
    dp = int(_header_value(lines, 5, "dp"))
    neighbors = _header_value(lines, 6, "neighbors_only") == "true"
    gate_count = int(_header_value(lines, 7, "gates"))

    pos = 8
    if pos + gate_count > len(lines):
        raise TruncatedFileError("gate table cut short")
    gates = [_parse_gate_line(lines[pos + k], dp) for k in range(gate_count)]
    pos += gate_count

    meta = DatabaseMeta(n, d, dp, neighbors, GateSet(gates), convention=convention)
    db = IdentityDatabase(meta)

    body_lines: list[str] = []
    while pos < len(lines) and lines[pos].startswith("FP "):
        fields = lines[pos].split(" ")
        if len(fields) != 3:
            raise DatabaseFormatError(f"malformed bucket header {lines[pos]!r}")
        fp = Fingerprint.from_hex(fields[1])
        count = int(fields[2])
        body_lines.append(lines[pos])
        pos += 1
        if pos + count > len(lines):
            raise TruncatedFileError("bucket cut short")
        encs = lines[pos : pos + count]
        body_lines.extend(encs)
        pos += count
        db.by_fingerprint[fp] = list(encs)
        for enc in encs:
            db.by_circuit[enc] = fp

    if pos >= len(lines) or not lines[pos].startswith("END "):
        raise TruncatedFileError("missing END footer")
    fields = lines[pos].split(" ")
    if len(fields) != 3:
        raise DatabaseFormatError(f"malformed END line {lines[pos]!r}")
    total, checksum = int(fields[1]), fields[2]
    body = "".join(line + "\n" for line in body_lines)
    actual = hashlib.md5(body.encode("utf-8")).hexdigest()
    if actual != checksum:
        raise ChecksumMismatchError("body checksum mismatch")
    if total != db.total_circuits:
        raise DatabaseFormatError(
            f"footer says {total} circuits, file holds {db.total_circuits}"
        )
    return db


def load(path) -> IdentityDatabase:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
