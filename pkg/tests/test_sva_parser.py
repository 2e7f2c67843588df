"""Parser behavior: precedence, subset boundaries, extraction."""

import pytest

from svaforge.errors import ParseError, UnsupportedConstruct
from svaforge.sva import ast as A
from svaforge.sva import extract_assertions, parse_assertion, parse_bool, \
    signals_of

NESTED_IMPL = (
    "asrt_term_complement: assert property (@(posedge i_clk) "
    "disable iff (tb_reset) ctrl_comp |-> (term == (~mux_out + 1)) "
    "and !ctrl_comp |-> (term == mux_out));"
)


def test_unparenthesized_implication_nests_to_the_right():
    a = parse_assertion(NESTED_IMPL)
    assert a.label == "asrt_term_complement"
    assert a.clock == A.ClockEvent("posedge", "i_clk")
    assert a.disable == A.Ident("tb_reset")
    expected = A.Implication(
        True,
        A.SeqBool(A.Ident("ctrl_comp")),
        A.Implication(
            True,
            A.SeqBool(A.Binary(
                "&&",
                A.Binary("==", A.Ident("term"),
                         A.Binary("+", A.Unary("~", A.Ident("mux_out")),
                                  A.Literal(32, 1))),
                A.Unary("!", A.Ident("ctrl_comp")))),
            A.Seq(A.SeqBool(
                A.Binary("==", A.Ident("term"), A.Ident("mux_out")))),
        ),
    )
    assert a.body == expected


def test_parenthesized_version_is_a_conjunction():
    fixed = NESTED_IMPL.replace(
        "ctrl_comp |-> (term == (~mux_out + 1)) and !ctrl_comp |-> "
        "(term == mux_out)",
        "(ctrl_comp |-> (term == (~mux_out + 1))) and (!ctrl_comp |-> "
        "(term == mux_out))")
    a = parse_assertion(fixed)
    assert isinstance(a.body, A.And)
    assert isinstance(a.body.left, A.Implication)
    assert isinstance(a.body.right, A.Implication)


def test_signals_of_nested_example_in_first_occurrence_order():
    a = parse_assertion(NESTED_IMPL)
    assert signals_of(a) == ["i_clk", "tb_reset", "ctrl_comp", "term",
                             "mux_out"]


def test_signals_of_handshake_example():
    a = parse_assertion(
        "asrt: assert property (@(posedge clk) disable iff (tb_reset) "
        "(cmd_valid && !busy) |=> busy);")
    assert signals_of(a) == ["clk", "tb_reset", "cmd_valid", "busy"]


def test_default_label_and_optional_semicolon():
    a = parse_assertion("assert property (@(posedge clk) req |-> gnt)")
    assert a.label == "anon"
    assert isinstance(a.body, A.Implication)


def test_nonoverlapped_and_delay_forms():
    a = parse_assertion(
        "x: assert property (@(posedge clk) a ##[1:3] b |=> c);")
    imp = a.body
    assert not imp.overlapped
    assert isinstance(imp.antecedent, A.Delay)
    assert (imp.antecedent.lo, imp.antecedent.hi) == (1, 3)


def test_leading_delay_has_no_left_operand():
    a = parse_assertion("x: assert property (@(posedge clk) ##2 done);")
    seq = a.body.seq
    assert isinstance(seq, A.Delay)
    assert seq.left is None and seq.lo == seq.hi == 2


def test_repeat_bounds():
    a = parse_assertion("x: assert property (@(posedge clk) b [*2:4] |-> c);")
    rep = a.body.antecedent
    assert isinstance(rep, A.Repeat)
    assert (rep.lo, rep.hi) == (2, 4)


@pytest.mark.parametrize("text", [
    "x: assert property (@(posedge clk) a [*0] |-> b);",
    "x: assert property (@(posedge clk) a [*] |-> b);",
    "x: assert property (@(posedge clk) a [*1:$] |-> b);",
    "x: assert property (@(posedge clk) a throughout b);",
    "x: assert property (@(posedge clk) s_eventually a);",
    "x: assert property (@(posedge clk) $onehot(a));",
])
def test_out_of_subset_constructs_are_flagged(text):
    with pytest.raises(UnsupportedConstruct):
        parse_assertion(text)


@pytest.mark.parametrize("text", [
    "x: assert property (@(posedge clk) 4'bxx01 == a);",
    "x: assert property (@(posedge clk) a |-> );",
    "x: assert property (@(posedge clk) a |-> b) trailing;",
    "x: assert property ();",
])
def test_malformed_inputs_report_parse_errors(text):
    with pytest.raises(ParseError) as err:
        parse_assertion(text)
    assert err.value.offset >= 0


def test_parse_error_not_raised_for_unsized_literals():
    a = parse_bool("count == 10")
    assert a == A.Binary("==", A.Ident("count"), A.Literal(32, 10))


def test_sized_literal_bases():
    assert parse_bool("4'hA") == A.Literal(4, 10)
    assert parse_bool("3'b101") == A.Literal(3, 5)
    assert parse_bool("8'd200") == A.Literal(8, 200)


def test_bool_precedence_equality_binds_tighter_than_and():
    e = parse_bool("a == b && c")
    assert e == A.Binary("&&", A.Binary("==", A.Ident("a"), A.Ident("b")),
                         A.Ident("c"))


def test_bool_precedence_arith_tighter_than_compare():
    e = parse_bool("a + b < c")
    assert e == A.Binary("<", A.Binary("+", A.Ident("a"), A.Ident("b")),
                         A.Ident("c"))


def test_redundant_parens_are_dropped():
    assert parse_bool("((a))") == A.Ident("a")
    assert parse_bool("(a && b)") == A.Binary("&&", A.Ident("a"),
                                              A.Ident("b"))


def test_bit_selects():
    e = parse_bool("data[7:4] == 4'h0")
    assert e.left == A.Ident("data", (7, 4))
    single = parse_bool("flags[2]")
    assert single == A.Ident("flags", (2, 2))


def test_extract_from_fenced_block():
    text = ("Here is the assertion:\n```systemverilog\n"
            "p: assert property (@(posedge clk) a |-> b);\n```\nDone.")
    cands = extract_assertions(text)
    assert len(cands) == 1
    assert cands[0].assertion is not None
    assert cands[0].assertion.label == "p"


def test_extract_from_prose_and_malformed_mix():
    text = ("First p1: assert property (@(posedge clk) a |-> b); then "
            "broken: assert property (@(posedge clk) a |->); end")
    cands = extract_assertions(text)
    assert len(cands) == 2
    parsed = [c for c in cands if c.assertion is not None]
    failed = [c for c in cands if c.assertion is None]
    assert len(parsed) == 1 and parsed[0].assertion.label == "p1"
    assert len(failed) == 1 and failed[0].error is not None


def test_extract_returns_empty_for_prose_only():
    assert extract_assertions("No properties are needed here.") == []


def test_comments_are_ignored():
    a = parse_assertion(
        "x: assert property (@(posedge clk) // clocking\n"
        "  a /* antecedent */ |-> b);")
    assert isinstance(a.body, A.Implication)
