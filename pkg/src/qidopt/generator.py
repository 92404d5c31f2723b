"""Exhaustive enumeration of circuits over a gate set and construction of
the identity database.

Enumeration order is fixed: layers come out in lexicographic order (qubit
index major, gate declaration order; two-qubit placements after singles
for each anchor qubit, partner ascending, first-operand orientation before
second), and circuits are the depth-fold Cartesian product of layers with
the first layer's index slowest. Database files are therefore reproducible
byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .circuit import CircuitGrid, Layer, half, layer_is_identity, layer_unitary, single
from .database import DatabaseMeta, IdentityDatabase, encode_cell
from .fingerprint import fingerprint, rounded_matrix
from .gates import GateDef, GateSet
from .matrices import identity, is_unitary

DEFAULT_MAX_CIRCUITS = 10**7
MAX_QUBITS = 4
MAX_DEPTH = 6


class ResourceGuardError(RuntimeError):
    """Enumeration would exceed the configured circuit budget."""

    def __init__(self, total: int, limit: int):
        super().__init__(
            f"enumeration would produce {total} circuits, over the limit of "
            f"{limit}; raise the limit to override"
        )
        self.total = total
        self.limit = limit


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    d: int
    gate_set: GateSet
    dp: int = 8
    neighbors_only: bool = False
    allow_large: bool = False
    max_circuits: int = DEFAULT_MAX_CIRCUITS

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be at least 1")
        if not (1 <= self.dp <= 15):
            raise ValueError("dp must be in [1, 15]")
        if not self.allow_large and (self.n > MAX_QUBITS or self.d > MAX_DEPTH):
            raise ValueError(
                f"n <= {MAX_QUBITS} and d <= {MAX_DEPTH} unless allow_large is set"
            )


def scaling_count(n: int, d: int, g: int, t: int) -> int:
    """Total circuit count: S = S_l^d with
    S_l = sum_r n!/(r!(n-2r)!) * g^(n-2r) * t^r, in exact integers."""
    if n < 1 or d < 1 or g < 0 or t < 0:
        raise ValueError("need n >= 1, d >= 1, g >= 0, t >= 0")
    per_layer = 0
    for r in range(n // 2 + 1):
        coeff = math.factorial(n) // (math.factorial(r) * math.factorial(n - 2 * r))
        per_layer += coeff * g ** (n - 2 * r) * t**r
    return per_layer**d


def enumerate_layers(
    n: int, gate_set: GateSet, neighbors_only: bool = False
) -> list[Layer]:
    """All distinct single layers over the gate set.

    Every assignment of arity-1 gates, plus every placement of each
    arity-2 gate on an ordered qubit pair (both orientations), including
    multiple disjoint two-qubit gates per layer. With neighbors_only,
    pairs are restricted to |a-b| = 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    singles = gate_set.singles
    twos = gate_set.twos
    layers: list[Layer] = []
    cells: list = [None] * n

    def fill(q: int) -> None:
        if q == n:
            layers.append(tuple(cells))
            return
        if cells[q] is not None:  # already claimed by a pair
            fill(q + 1)
            return
        for gate in singles:
            cells[q] = single(gate)
            fill(q + 1)
        cells[q] = None
        for p in range(q + 1, n):
            if cells[p] is not None:
                continue
            if neighbors_only and p - q != 1:
                continue
            for gate in twos:
                for a, b in ((q, p), (p, q)):  # orientation: a is first operand
                    cells[a] = half(gate, "C", b)
                    cells[b] = half(gate, "T", a)
                    fill(q + 1)
            cells[q] = None
            cells[p] = None

    fill(0)
    return layers


def enumerate_circuits(cfg: GeneratorConfig) -> Iterator[CircuitGrid]:
    """All d-layer circuits, lexicographic in layer indices."""
    layers = enumerate_layers(cfg.n, cfg.gate_set, cfg.neighbors_only)
    _check_budget(cfg, len(layers))

    def rec(level: int, chosen: list[Layer]) -> Iterator[CircuitGrid]:
        if level == cfg.d:
            yield CircuitGrid(cfg.n, tuple(chosen))
            return
        for layer in layers:
            chosen.append(layer)
            yield from rec(level + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def _check_budget(cfg: GeneratorConfig, layer_count: int) -> None:
    total = layer_count**cfg.d
    if total > cfg.max_circuits:
        raise ResourceGuardError(total, cfg.max_circuits)


def _rounded_gate_set(gs: GateSet, dp: int) -> GateSet:
    """Copies of the gates with dp-rounded matrices (what the file stores)."""
    rounded = []
    for g in gs.gates:
        m = rounded_matrix(g.matrix, dp)
        tol = max(1e-10, 4.0 * m.shape[0] * 10.0**-dp)
        if not is_unitary(m, tol):
            raise ValueError(f"gate {g.name} not unitary after dp rounding")
        rounded.append(GateDef(g.name, g.arity, m, g.qasm_name, g.template, g.angles))
    return GateSet(rounded)


def build_database(cfg: GeneratorConfig) -> IdentityDatabase:
    """Enumerate, fingerprint, and index every circuit of the config.

    Bucket lists come out sorted by (effective depth, encoding) so the
    cheapest identity is first.
    """
    layers = enumerate_layers(cfg.n, cfg.gate_set, cfg.neighbors_only)
    _check_budget(cfg, len(layers))

    mats = [layer_unitary(layer, cfg.n) for layer in layers]
    encs = [",".join(encode_cell(c) for c in layer) for layer in layers]
    eff = [0 if layer_is_identity(layer) else 1 for layer in layers]

    meta = DatabaseMeta(
        cfg.n, cfg.d, cfg.dp, cfg.neighbors_only, _rounded_gate_set(cfg.gate_set, cfg.dp)
    )
    db = IdentityDatabase(meta)
    buckets: dict = {}
    dp = cfg.dp
    indices = range(len(layers))

    def rec(level: int, prefix, enc_parts: list[str], cost: int) -> None:
        last = level == cfg.d - 1
        for i in indices:
            u = mats[i] @ prefix
            enc_parts.append(encs[i])
            if last:
                enc = "|".join(enc_parts)
                fp = fingerprint(u, dp)
                db.by_circuit[enc] = fp
                buckets.setdefault(fp, []).append((cost + eff[i], enc))
            else:
                rec(level + 1, u, enc_parts, cost + eff[i])
            enc_parts.pop()

    rec(0, identity(1 << cfg.n), [], 0)

    for fp, members in buckets.items():
        members.sort()
        db.by_fingerprint[fp] = [enc for _, enc in members]
    return db
