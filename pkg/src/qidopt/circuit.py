"""Grid representation of quantum circuits and unitary evaluation.

A circuit is a grid of layers (time steps) over n qubits. Every cell is
filled: single-qubit cells hold a gate (Identity where nothing acts), and
a two-qubit gate occupies two cells of the same layer, split into a
first-operand half (role 'C') and a second-operand half (role 'T'), each
pointing at its partner's qubit index.

Conventions fixed here and relied on everywhere else:
  * qubit 0 is the most-significant tensor factor;
  * the circuit unitary is U = L_m ··· L_1 with the first layer applied
    first (rightmost in the product).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import GateDef
from .matrices import ComplexMatrix, identity

FIRST = "C"
SECOND = "T"


class StructuralError(ValueError):
    """A grid violates the two-qubit pairing rules."""


@dataclass(frozen=True, eq=False)
class Cell:
    """One grid slot: a single-qubit gate, or half of a two-qubit gate."""

    gate: GateDef
    role: str | None = None  # FIRST/SECOND for two-qubit halves
    partner: int | None = None

    @property
    def is_single(self) -> bool:
        return self.role is None

    def __repr__(self):
        if self.is_single:
            return f"Cell({self.gate.name})"
        return f"Cell({self.gate.name}:{self.role}:{self.partner})"


def single(gate: GateDef) -> Cell:
    if gate.arity != 1:
        raise ValueError(f"gate {gate.name} is not single-qubit")
    return Cell(gate)


def half(gate: GateDef, role: str, partner: int) -> Cell:
    if gate.arity != 2:
        raise ValueError(f"gate {gate.name} is not two-qubit")
    if role not in (FIRST, SECOND):
        raise ValueError(f"bad two-qubit role {role!r}")
    return Cell(gate, role, partner)


Layer = tuple[Cell, ...]


@dataclass(frozen=True, eq=False)
class CircuitGrid:
    """n qubits × m layers of cells. Immutable after construction."""

    n: int
    layers: tuple[Layer, ...]

    @property
    def m(self) -> int:
        return len(self.layers)

    @classmethod
    def from_lists(cls, n: int, layers) -> "CircuitGrid":
        return cls(n, tuple(tuple(layer) for layer in layers))

    def __repr__(self):
        return f"CircuitGrid(n={self.n}, m={self.m})"


def validate(c: CircuitGrid) -> list[str]:
    """Return structural violations (empty list when the grid is valid).

    Each violation names the layer, qubit, and broken rule.
    """
    problems: list[str] = []
    if c.n < 1:
        problems.append("circuit must have at least one qubit")
        return problems
    for li, layer in enumerate(c.layers):
        if len(layer) != c.n:
            problems.append(f"layer {li}: expected {c.n} cells, got {len(layer)}")
            continue
        for q, cell in enumerate(layer):
            if cell.is_single:
                if cell.gate.arity != 1:
                    problems.append(
                        f"layer {li}, qubit {q}: two-qubit gate in a single cell"
                    )
                continue
            p = cell.partner
            if p is None or not (0 <= p < c.n) or p == q:
                problems.append(
                    f"layer {li}, qubit {q}: partner index {p} out of range"
                )
                continue
            other = layer[p]
            if other.is_single:
                problems.append(f"layer {li}, qubit {q}: unpaired two-qubit half")
                continue
            if other.partner != q or other.gate.name != cell.gate.name:
                problems.append(
                    f"layer {li}, qubit {q}: mismatched two-qubit halves"
                )
                continue
            if other.role == cell.role:
                problems.append(f"layer {li}, qubit {q}: duplicate role {cell.role}")
    return problems


def _embed_two_qubit(
    gate4: ComplexMatrix, first: int, second: int, n: int
) -> ComplexMatrix:
    """Embed a 4×4 gate acting on the (first, second) qubit pair into 2^n dims.

    Works for any qubit pair, adjacent or not: each basis state's (first,
    second) bit pair selects a column of the 4×4 block, and amplitudes
    scatter back to the states with those bits rewritten.
    """
    dim = 1 << n
    sa, sb = n - 1 - first, n - 1 - second  # bit shifts; qubit 0 most significant
    out = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        xa = (col >> sa) & 1
        xb = (col >> sb) & 1
        base = col & ~(1 << sa) & ~(1 << sb)
        cin = 2 * xa + xb
        for ya in (0, 1):
            for yb in (0, 1):
                amp = gate4[2 * ya + yb, cin]
                if amp != 0:
                    out[base | (ya << sa) | (yb << sb), col] = amp
    return out


def layer_unitary(layer: Layer, n: int) -> ComplexMatrix:
    """2^n × 2^n unitary of one layer.

    Single-qubit cells combine by Kronecker product in qubit order;
    two-qubit gates are applied through basis-index embedding. Raises
    StructuralError on an unpaired half.
    """
    factors: list[ComplexMatrix] = []
    pairs: list[tuple[int, int, ComplexMatrix]] = []
    for q, cell in enumerate(layer):
        if cell.is_single:
            factors.append(cell.gate.matrix)
            continue
        factors.append(identity(2))
        p = cell.partner
        if (
            p is None
            or not (0 <= p < n)
            or layer[p].is_single
            or layer[p].partner != q
        ):
            raise StructuralError(f"unpaired two-qubit half on qubit {q}")
        if cell.role == FIRST:
            pairs.append((q, p, cell.gate.matrix))
    u = factors[0]
    for f in factors[1:]:
        u = np.kron(u, f)
    for first, second, mat in pairs:
        u = _embed_two_qubit(mat, first, second, n) @ u
    return u


def circuit_unitary(c: CircuitGrid) -> ComplexMatrix:
    """Temporal product of layer unitaries: U = L_m ··· L_1."""
    u = identity(1 << c.n)
    for layer in c.layers:
        u = layer_unitary(layer, c.n) @ u
    return u


def cell_is_identity(cell: Cell) -> bool:
    return cell.is_single and cell.gate.is_identity


def layer_is_identity(layer: Layer) -> bool:
    return all(cell_is_identity(cell) for cell in layer)


def effective_depth(c: CircuitGrid) -> int:
    """Number of layers containing at least one non-Identity cell."""
    return sum(1 for layer in c.layers if not layer_is_identity(layer))
