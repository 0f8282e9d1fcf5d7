"""Gate library: truth tables, bijectivity, inverses, gate files."""

import pytest

from revseq.errors import NonBijectiveError, RevseqError
from revseq.expr import parse_expr
from revseq.gates import (GateRegistry, Permutation, eval_gate, format_gate,
                          format_gates, gate_from_exprs, gate_from_permutation,
                          inverse_gate, is_bijective, parse_gates, truth_table)

# Hand-entered reference rows for the two 4x4 gates, independent of the
# shipped golden CSVs: output word for each input word 0000..1111.
MG1_IMAGE = [0b0000, 0b1001, 0b0011, 0b1010,
             0b0100, 0b1101, 0b0111, 0b1110,
             0b1100, 0b0101, 0b1000, 0b0001,
             0b1111, 0b0110, 0b1011, 0b0010]

MG2_IMAGE = [0b0000, 0b0001, 0b0010, 0b0011,
             0b0100, 0b0101, 0b0110, 0b0111,
             0b1101, 0b1100, 0b1001, 0b1000,
             0b1111, 0b1110, 0b1011, 0b1010]


def test_mg1_truth_table_rows(registry):
    t = truth_table(registry.get("MG1"))
    assert [o for _, o in t.rows] == MG1_IMAGE
    assert [i for i, _ in t.rows] == list(range(16))


def test_mg2_truth_table_rows(registry):
    t = truth_table(registry.get("MG2"))
    assert [o for _, o in t.rows] == MG2_IMAGE


def test_mg2_passes_through_when_a_is_zero(registry):
    # rows 0000-0111: P = 0 and (Q, R, S) = (B, C, D)
    for w in range(8):
        assert eval_gate(registry.get("MG2"), w) == w


def test_mg1_s_column_is_r_xor_d(registry):
    mg1 = registry.get("MG1")
    for w in range(16):
        out = eval_gate(mg1, w)
        r = (out >> 1) & 1
        s = out & 1
        assert s == r ^ (w & 1)


def test_all_builtins_bijective(registry):
    for gate in registry:
        assert is_bijective(truth_table(gate)).ok, gate.name


def test_inverse_composition_identity(registry):
    checks = 0
    for gate in registry:
        inv = inverse_gate(gate)
        for x in range(1 << gate.arity):
            assert eval_gate(inv, eval_gate(gate, x)) == x
            checks += 1
    # 2 + 4 + 8 + 8 + 8 + 16 + 16 rows across the seven gates
    assert checks == 62


def test_inverse_gate_swaps_line_names(registry):
    inv = inverse_gate(registry.get("FG"))
    assert inv.name == "FG_inv"
    assert inv.inputs == ("P", "Q")
    assert inv.outputs == ("A", "B")


def test_feynman_is_self_inverse(registry):
    fg = registry.get("FG")
    inv = inverse_gate(fg)
    assert [o for _, o in truth_table(inv).rows] == \
        [o for _, o in truth_table(fg).rows]


def test_eval_gate_spot_rows(registry):
    assert eval_gate(registry.get("MG1"), 0b1011) == 0b0001
    assert eval_gate(registry.get("MG2"), 0b1000) == 0b1101
    assert eval_gate(registry.get("FRG"), 0b101) == 0b110


def test_eval_gate_word_out_of_range(registry):
    with pytest.raises(RevseqError):
        eval_gate(registry.get("FG"), 4)
    with pytest.raises(RevseqError):
        eval_gate(registry.get("FG"), -1)


def test_toffoli_flips_target_only_when_controls_high(registry):
    t = truth_table(registry.get("TG"))
    for i, o in t.rows:
        if i in (0b110, 0b111):
            assert o == i ^ 1
        else:
            assert o == i


def test_feynman_outputs(registry):
    fg = registry.get("FG")
    assert fg.arity == 2
    assert [o for _, o in truth_table(fg).rows] == [0b00, 0b01, 0b11, 0b10]


def test_registry_lookup_unknown_name(registry):
    with pytest.raises(RevseqError, match="unknown gate 'XYZ'"):
        registry.get("XYZ")
    assert "MG1" in registry
    assert "XYZ" not in registry
    assert len(registry) == 7


def test_registry_rejects_duplicate_names(registry):
    reg = GateRegistry([registry.get("FG")])
    with pytest.raises(RevseqError, match="already registered"):
        reg.add(registry.get("FG"))


def test_registry_replaced_swaps_one_gate(registry):
    swap = gate_from_permutation("MG1", 4, list(range(16)))
    reg = registry.replaced(swap)
    assert eval_gate(reg.get("MG1"), 5) == 5
    assert reg.names() == registry.names()
    # original registry untouched
    assert eval_gate(registry.get("MG1"), 5) == MG1_IMAGE[5]


def test_non_bijective_definition_rejected_with_witness():
    with pytest.raises(NonBijectiveError) as exc:
        gate_from_exprs("BAD", ["A", "B"],
                        [("P", parse_expr("A")), ("Q", parse_expr("A"))])
    assert exc.value.witness == (0, 1)


def test_gate_from_permutation_identity():
    g = gate_from_permutation("ID2", 2, [0, 1, 2, 3])
    for x in range(4):
        assert eval_gate(g, x) == x


def test_gate_from_permutation_rejects_repeats():
    with pytest.raises(Exception):
        gate_from_permutation("BAD", 2, [0, 0, 1, 2])


def test_permutation_and_expression_forms_agree(registry):
    perm_mg1 = gate_from_permutation("MG1P", 4, MG1_IMAGE)
    assert [o for _, o in truth_table(perm_mg1).rows] == \
        [o for _, o in truth_table(registry.get("MG1")).rows]


def test_permutation_inverse_round_trips():
    p = Permutation(MG1_IMAGE)
    inv = p.inverse()
    for x in range(16):
        assert inv.image[p.image[x]] == x


def test_arity_cap_enforced():
    with pytest.raises(Exception):
        gate_from_permutation("HUGE", 17, list(range(1 << 17)))


def test_mg1_q_column_note(registry):
    # the Q column's definition carries a note about the conflicting
    # variant form that contradicts table rows 1000 and 1010
    note = registry.get("MG1").provenance
    assert note and "1000" in note and "1010" in note


def test_builtins_have_no_quantum_cost(registry):
    assert all(g.quantum_cost is None for g in registry)


GATE_FILE = """\
# a couple of extra gates
gate SWAP2(2) perm = [0, 2, 1, 3]
    meta quantum_cost = 0

gate XNOR2(A, B) -> (P, Q)
    P = A
    Q = !(A ^ B)   # second line keeps it reversible
    meta quantum_cost = 2
"""


def test_parse_gate_file():
    gates = parse_gates(GATE_FILE)
    assert [g.name for g in gates] == ["SWAP2", "XNOR2"]
    swap, xnor = gates
    assert swap.perm.image == (0, 2, 1, 3)
    assert swap.quantum_cost == 0
    assert xnor.quantum_cost == 2
    assert [o for _, o in truth_table(xnor).rows] == [0b01, 0b00, 0b10, 0b11]


def test_gate_file_round_trip_is_stable():
    gates = parse_gates(GATE_FILE)
    once = format_gates(gates)
    assert format_gates(parse_gates(once)) == once
    assert parse_gates(once) == gates


def test_format_gate_expression_form(registry):
    text = format_gate(registry.get("FG"))
    assert text == "gate FG(A, B) -> (P, Q)\n    P = A\n    Q = A ^ B\n"


def test_gate_file_rejects_mismatched_def_count():
    with pytest.raises(Exception):
        parse_gates("gate HALF(A, B) -> (P, Q)\n    P = A\n")


def test_gate_file_rejects_unknown_line():
    from revseq.errors import ParseError
    with pytest.raises(ParseError) as exc:
        parse_gates("gate F(A) -> (P)\n    P = A\nwibble\n")
    assert exc.value.line == 3


def test_permutation_rejects_out_of_range_entry():
    with pytest.raises(RevseqError):
        Permutation((0, 4, 1, 2))


def test_gate_from_exprs_rejects_unknown_variable():
    with pytest.raises(RevseqError, match="unknown variable"):
        gate_from_exprs("BAD", ["A"], [("P", parse_expr("B"))])
