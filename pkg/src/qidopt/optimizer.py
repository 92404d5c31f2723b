"""Tile extraction, identity lookup, and cost-based substitution.

The optimizer slides an i×j window over the circuit grid, replaces each
window's contents with the cheapest equivalent circuit found in the
database, and repeats the whole sweep a fixed number of times. A two-qubit
gate reaching across the window's qubit boundary makes the window unusable
unless the cut half sits in the window's first or last layer, in which
case the half is temporarily replaced by Identity for the lookup and
restored after the substitution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .circuit import (
    Cell,
    CircuitGrid,
    cell_is_identity,
    circuit_unitary,
    effective_depth,
    layer_is_identity,
    single,
    validate,
)
from .database import (
    IdentityDatabase,
    decode_circuit,
    encode_circuit,
    encoding_effective_depth,
    encoding_gate_cells,
)
from .fingerprint import fingerprint
from .gates import I as IDENTITY_GATE
from .gates import GateDef
from .matrices import max_abs_diff


class TileClass(enum.Enum):
    VALID = "valid"
    VALID_WITH_CUT = "valid-with-cut"
    INVALID = "invalid"


@dataclass(frozen=True)
class TileSpec:
    """Window shape: i qubit rows × j layers."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1:
            raise ValueError("tile dimensions must be at least 1")


@dataclass
class Tile:
    """A window of the circuit.

    `sub` holds the window cells with partner indices rebased to tile-local
    rows; a half whose partner lies outside the window keeps an out-of-range
    partner until normalize_cut_tile replaces it with Identity and records
    the original in cut_positions (tile-local coordinates).
    """

    qubit_offset: int
    layer_offset: int
    sub: CircuitGrid
    cut_positions: list[tuple[int, int, Cell]] = field(default_factory=list)

    def boundary_cells(self) -> list[tuple[int, int, Cell]]:
        """Halves whose partner lies outside the window's qubit range."""
        out = []
        for li, layer in enumerate(self.sub.layers):
            for q, cell in enumerate(layer):
                if not cell.is_single and not (0 <= cell.partner < self.sub.n):
                    out.append((li, q, cell))
        return out


def extract_tiles(c: CircuitGrid, spec: TileSpec) -> list[Tile]:
    """All contiguous i×j windows, ordered by (layer_offset, qubit_offset).

    Count is (n−i+1)·(m−j+1); raises ValueError when the spec does not fit.
    """
    if spec.i > c.n or spec.j > c.m:
        raise ValueError(
            f"tile {spec.i}x{spec.j} does not fit circuit {c.n}x{c.m}"
        )
    tiles = []
    for ls in range(c.m - spec.j + 1):
        for qs in range(c.n - spec.i + 1):
            layers = []
            for layer in c.layers[ls : ls + spec.j]:
                row = []
                for cell in layer[qs : qs + spec.i]:
                    if cell.is_single:
                        row.append(cell)
                    else:
                        row.append(Cell(cell.gate, cell.role, cell.partner - qs))
                layers.append(tuple(row))
            tiles.append(Tile(qs, ls, CircuitGrid(spec.i, tuple(layers))))
    return tiles


def classify_tile(t: Tile) -> TileClass:
    """Invalid iff a boundary-cut half sits in an interior layer."""
    boundary = t.boundary_cells()
    if not boundary:
        return TileClass.VALID
    last = t.sub.m - 1
    for li, _, _ in boundary:
        if li != 0 and li != last:
            return TileClass.INVALID
    return TileClass.VALID_WITH_CUT


def normalize_cut_tile(t: Tile, identity: GateDef = IDENTITY_GATE) -> Tile:
    """Replace boundary-cut halves with Identity, recording the originals.

    Raises ValueError for an Invalid tile.
    """
    cls = classify_tile(t)
    if cls is TileClass.INVALID:
        raise ValueError("cannot normalize an invalid tile")
    if cls is TileClass.VALID:
        return Tile(t.qubit_offset, t.layer_offset, t.sub, [])
    cuts = t.boundary_cells()
    cut_at = {(li, q) for li, q, _ in cuts}
    layers = []
    for li, layer in enumerate(t.sub.layers):
        layers.append(
            tuple(
                single(identity) if (li, q) in cut_at else cell
                for q, cell in enumerate(layer)
            )
        )
    return Tile(t.qubit_offset, t.layer_offset, CircuitGrid(t.sub.n, tuple(layers)), cuts)


def lookup(t: Tile, db: IdentityDatabase) -> list[str]:
    """Equivalent encodings for a normalized tile, the tile itself excluded.

    Uses the encoding table when the tile has the database's exact shape;
    otherwise computes the tile's unitary and fingerprints it directly.
    """
    enc = encode_circuit(t.sub)
    meta = db.meta
    if t.sub.n == meta.n and t.sub.m == meta.d and enc in db.by_circuit:
        fp = db.by_circuit[enc]
    else:
        fp = fingerprint(circuit_unitary(t.sub), meta.dp)
    return [cand for cand in db.bucket(fp) if cand != enc]


def cost(enc: str, db: IdentityDatabase) -> int:
    """Depth of the decoded circuit, ignoring Identity gates."""
    return effective_depth(db.decode(enc))


def _candidate_order(
    t: Tile,
    candidates: list[str],
    db: IdentityDatabase,
    neighbors_only: bool,
) -> list[tuple[int, str]]:
    """Admissible candidates as (cost, encoding), cheapest first.

    A candidate must hold Identity at every cut slot (so restoration cannot
    collide), satisfy the neighbouring constraint when asked, and beat the
    tile's own cost strictly. Ties break on fewer non-Identity cells, then
    lexicographic encoding.
    """
    ident = db.meta.gate_set.identity.name
    tile_cost = effective_depth(t.sub)
    db_shape = (db.meta.n, db.meta.d)
    same_shape = (t.sub.n, t.sub.m) == db_shape
    if not same_shape and (t.cut_positions or t.sub.n != db.meta.n):
        return []

    ranked = []
    for enc in candidates:
        c = encoding_effective_depth(enc, ident)
        if c >= tile_cost:
            continue
        ranked.append((c, encoding_gate_cells(enc, ident), enc))
    ranked.sort()

    out = []
    for c, _, enc in ranked:
        if t.cut_positions:
            grid = db.decode(enc)
            if not all(
                cell_is_identity(grid.layers[li][q]) for li, q, _ in t.cut_positions
            ):
                continue
        if neighbors_only and not _encoding_neighbors_ok(enc):
            continue
        out.append((c, enc))
    return out


def _encoding_neighbors_ok(enc: str) -> bool:
    for layer in enc.split("|"):
        for q, tok in enumerate(layer.split(",")):
            if ":" in tok:
                partner = int(tok.rsplit(":", 1)[1])
                if abs(partner - q) > 1:
                    return False
    return True


def select_substitution(
    t: Tile,
    candidates: list[str],
    db: IdentityDatabase,
    neighbors_only: bool = False,
) -> str | None:
    """Minimum-cost admissible candidate, or None when nothing qualifies."""
    ordered = _candidate_order(t, candidates, db, neighbors_only)
    return ordered[0][1] if ordered else None


def apply_substitution(
    c: CircuitGrid, t: Tile, chosen: str, db: IdentityDatabase
) -> CircuitGrid:
    """Splice the chosen encoding into the window, restore cut halves, and
    drop all-Identity layers. The result must validate; a failure here is
    an internal error."""
    sub = decode_circuit(chosen, db.meta.gate_set)
    qs, ls = t.qubit_offset, t.layer_offset
    window_m = t.sub.m

    def rebased(cell: Cell) -> Cell:
        if cell.is_single:
            return cell
        return Cell(cell.gate, cell.role, cell.partner + qs)

    new_window = [[rebased(cell) for cell in layer] for layer in sub.layers]
    for li, q, original in t.cut_positions:
        # cut halves in the window's last layer stay in the spliced last layer
        target = li if li == 0 else len(new_window) - 1 + (li - (window_m - 1))
        new_window[target][q] = rebased(original)

    layers: list = list(c.layers[:ls])
    if sub.n == c.n:
        layers.extend(tuple(row) for row in new_window)
    else:
        if sub.m != window_m:
            raise ValueError("partial-height substitution must match window depth")
        for off, row in enumerate(new_window):
            old = list(c.layers[ls + off])
            old[qs : qs + sub.n] = row
            layers.append(tuple(old))
    layers.extend(c.layers[ls + window_m :])

    compact = tuple(layer for layer in layers if not layer_is_identity(layer))
    result = CircuitGrid(c.n, compact)
    problems = validate(result)
    if problems:
        raise AssertionError(f"substitution produced an invalid circuit: {problems}")
    return result


@dataclass
class AppliedSubstitution:
    layer_offset: int
    qubit_offset: int
    encoding: str
    cost_before: int
    cost_after: int


@dataclass
class OptimizeReport:
    initial_depth: int
    final_depth: int
    substitutions: list[AppliedSubstitution] = field(default_factory=list)
    iterations: int = 0
    residual: float = 0.0
    collisions_skipped: int = 0


def optimize(
    c: CircuitGrid,
    db: IdentityDatabase,
    spec: TileSpec | None = None,
    iters: int = 10,
    neighbors_only: bool = False,
) -> tuple[CircuitGrid, OptimizeReport]:
    """Sweep tiles and substitute until no sweep changes anything or the
    iteration budget runs out. The output always computes the same unitary
    as the input (verified; residual reported) and never has larger
    effective depth.
    """
    if spec is None:
        spec = TileSpec(db.meta.n, db.meta.d)
    if spec.i > db.meta.n or spec.j > db.meta.d:
        raise ValueError(
            f"tile {spec.i}x{spec.j} exceeds database bounds "
            f"{db.meta.n}x{db.meta.d}"
        )
    if iters < 1:
        raise ValueError("iters must be at least 1")

    report = OptimizeReport(initial_depth=effective_depth(c), final_depth=0)
    u_in = circuit_unitary(c)
    guard = 2.0 * 10.0 ** -db.meta.dp * (1 << db.meta.n)

    cur = c
    for it in range(iters):
        report.iterations = it + 1
        cur, changed = _sweep(cur, db, spec, neighbors_only, guard, report)
        if not changed:
            break

    report.final_depth = effective_depth(cur)
    report.residual = max_abs_diff(u_in, circuit_unitary(cur))
    return cur, report


def _sweep(
    c: CircuitGrid,
    db: IdentityDatabase,
    spec: TileSpec,
    neighbors_only: bool,
    guard: float,
    report: OptimizeReport,
) -> tuple[CircuitGrid, bool]:
    """One pass over the tile positions, re-extracting after every applied
    substitution and continuing forward."""
    i_eff = min(spec.i, c.n)
    changed = False
    idx = 0
    while True:
        j_eff = min(spec.j, c.m)
        if c.m == 0 or j_eff == 0:
            break
        tiles = extract_tiles(c, TileSpec(i_eff, j_eff))
        if idx >= len(tiles):
            break
        tile = tiles[idx]
        idx += 1
        if classify_tile(tile) is TileClass.INVALID:
            continue
        norm = normalize_cut_tile(tile, db.meta.gate_set.identity)
        candidates = lookup(norm, db)
        if not candidates:
            continue
        depth_before = effective_depth(c)
        tile_unitary = circuit_unitary(norm.sub)
        for cand_cost, enc in _candidate_order(norm, candidates, db, neighbors_only):
            cand_grid = db.decode(enc)
            # fingerprint-collision guard: candidates must really be equal
            if max_abs_diff(tile_unitary, circuit_unitary(cand_grid)) > guard:
                report.collisions_skipped += 1
                continue
            trial = apply_substitution(c, norm, enc, db)
            # a cheaper tile may still not help the whole circuit when other
            # rows keep its old layers alive; keep depth monotone
            if effective_depth(trial) > depth_before:
                continue
            report.substitutions.append(
                AppliedSubstitution(
                    norm.layer_offset,
                    norm.qubit_offset,
                    enc,
                    effective_depth(norm.sub),
                    cand_cost,
                )
            )
            c = trial
            changed = True
            break
    return c, changed
