"""Grid model: validation, layer/circuit unitaries, effective depth."""

import numpy as np
import pytest

from conftest import gate, gate_set, grid

from qidopt.circuit import (
    CircuitGrid,
    StructuralError,
    circuit_unitary,
    effective_depth,
    layer_unitary,
    single,
    validate,
)
from qidopt.generator import GeneratorConfig, enumerate_circuits
from qidopt.matrices import identity, is_unitary, kron, max_abs_diff


def basis_oracle_unitary(n, apply_fn):
    """Independent oracle: build a 2^n matrix column by column from a
    basis-state transition function bits -> list of (bits, amplitude)."""
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = tuple((col >> (n - 1 - q)) & 1 for q in range(n))
        for out_bits, amp in apply_fn(bits):
            row = 0
            for b in out_bits:
                row = (row << 1) | b
            u[row, col] += amp
    return u


class TestLayerUnitary:
    def test_pure_tensor(self):
        layer = grid("I,X").layers[0]
        got = layer_unitary(layer, 2)
        assert max_abs_diff(got, kron(identity(2), gate("X").matrix)) == 0.0

    def test_cx_layer_matches_gate_matrix(self):
        layer = grid("CX:C:1,CX:T:0").layers[0]
        assert max_abs_diff(layer_unitary(layer, 2), gate("CX").matrix) == 0.0

    def test_nonadjacent_cx_against_basis_oracle(self):
        # control q0, target q2: flip bit 2 when bit 0 is set
        def cx02(bits):
            b0, b1, b2 = bits
            return [((b0, b1, b2 ^ b0), 1.0)]

        want = basis_oracle_unitary(3, cx02)
        layer = grid("CX:C:2,I,CX:T:0").layers[0]
        assert max_abs_diff(layer_unitary(layer, 3), want) == 0.0

    def test_reversed_cx_against_basis_oracle(self):
        # control q1, target q0
        def xc(bits):
            b0, b1 = bits
            return [((b0 ^ b1, b1), 1.0)]

        want = basis_oracle_unitary(2, xc)
        layer = grid("CX:T:1,CX:C:0").layers[0]
        assert max_abs_diff(layer_unitary(layer, 2), want) == 0.0

    def test_unpaired_half_raises(self):
        bad = (grid("CX:C:1,CX:T:0").layers[0][0], single(gate("I")))
        with pytest.raises(StructuralError, match="unpaired"):
            layer_unitary(bad, 2)


class TestCircuitUnitary:
    def test_single_layer(self):
        c = grid("H,H")
        assert max_abs_diff(circuit_unitary(c), kron(gate("H").matrix, gate("H").matrix)) == 0.0

    def test_headline_five_layer_circuit_equals_x_on_q1(self):
        c = grid("I,H", "CX:C:1,CX:T:0", "Z,Z", "CX:C:1,CX:T:0", "I,H")
        want = circuit_unitary(grid("I,X"))
        assert max_abs_diff(circuit_unitary(c), want) <= 1e-12

    def test_h_h_is_identity(self):
        c = grid("H", "H")
        assert max_abs_diff(circuit_unitary(c), identity(2)) <= 1e-15

    def test_empty_circuit_is_identity(self):
        c = CircuitGrid(2, ())
        assert max_abs_diff(circuit_unitary(c), identity(4)) == 0.0

    def test_temporal_order_first_layer_applied_first(self):
        # X then H on one qubit: U = H·X, not X·H
        c = grid("X", "H")
        want = gate("H").matrix @ gate("X").matrix
        assert max_abs_diff(circuit_unitary(c), want) == 0.0


class TestEffectiveDepth:
    def test_all_identity(self):
        assert effective_depth(grid("I,I", "I,I", "I,I")) == 0

    def test_cost_table_cheap_candidate(self):
        assert effective_depth(grid("I,Y", "I,I", "I,I")) == 1

    def test_cost_table_expensive_candidate(self):
        assert effective_depth(grid("I,Y", "I,H", "I,H")) == 3

    def test_halves_always_count(self):
        assert effective_depth(grid("CX:C:1,CX:T:0")) == 1


class TestValidate:
    def test_valid_pair(self):
        assert validate(grid("CX:C:1,CX:T:0")) == []

    def test_unpaired_half(self):
        assert any(
            "unpaired two-qubit half" in v for v in validate(grid("CX:C:1,I,I"))
        )

    def test_duplicate_role(self):
        c = grid("CX:C:1,CX:C:0")
        assert any("duplicate role" in v for v in validate(c))

    def test_partner_out_of_range(self):
        c = grid("CX:C:5,CX:T:0")
        assert any("out of range" in v for v in validate(c))

    def test_mismatched_gates(self):
        c = grid("CX:C:1,CZ:T:0")
        assert any("mismatched" in v for v in validate(c))


class TestModelProperties:
    def test_circuit_unitary_is_unitary(self):
        gs = gate_set("I", "H", "S", "CX")
        for c in enumerate_circuits(GeneratorConfig(n=2, d=2, gate_set=gs)):
            assert is_unitary(circuit_unitary(c), 1e-9)

    def test_appending_identity_layer_changes_nothing(self):
        c = grid("H,H", "CX:C:1,CX:T:0")
        padded = CircuitGrid(2, c.layers + (grid("I,I").layers[0],))
        assert max_abs_diff(circuit_unitary(c), circuit_unitary(padded)) <= 1e-12
        assert effective_depth(padded) == effective_depth(c)

    def test_single_qubit_layer_is_kron_fold(self, rng):
        names = ["I", "X", "Y", "Z", "H", "S"]
        for _ in range(20):
            picks = [names[i] for i in rng.integers(0, len(names), size=3)]
            layer = grid(",".join(picks)).layers[0]
            want = kron(kron(gate(picks[0]).matrix, gate(picks[1]).matrix), gate(picks[2]).matrix)
            assert max_abs_diff(layer_unitary(layer, 3), want) == 0.0

    def test_swapping_cx_roles_reverses_it(self):
        fwd = circuit_unitary(grid("CX:C:1,CX:T:0"))
        rev = circuit_unitary(grid("CX:T:1,CX:C:0"))

        def reversed_cx(bits):
            b0, b1 = bits
            return [((b0 ^ b1, b1), 1.0)]

        assert max_abs_diff(rev, basis_oracle_unitary(2, reversed_cx)) == 0.0
        assert max_abs_diff(fwd, rev) > 0.5  # genuinely different
