"""Bounded verifier: proofs, equivalence, tautology, external adapter."""

import random

import pytest

from generators import rand_assertion
from oracles import ref_all_traces, ref_verdict
from svaforge.errors import (BoundExceeded, ToolUnavailable, UnknownSignal,
                             UnparseableToolOutput)
from svaforge.rtl import curate, parse_design
from svaforge.sva import parse_assertion
from svaforge.verify import (Bound, ExternalAdapter, Outcome, design_traces,
                             equivalent, external_check, free_tautology,
                             holds_on_design)

COUNTER = """
module counter(input clk, input rst_n, input en,
               output reg [3:0] pc_addr);
  always @(posedge clk or negedge rst_n) begin
    if (!rst_n)
      pc_addr <= 4'd0;
    else begin
      if (en)
        pc_addr <= pc_addr + 4'd1;
      else
        pc_addr <= pc_addr;
    end
  end
endmodule
"""

INC = ("inc: assert property (@(posedge clk) disable iff (!rst_n) "
       "en |=> pc_addr == $past(pc_addr) + 4'd1);")
HOLD = ("hold: assert property (@(posedge clk) disable iff (!rst_n) "
        "!en |=> pc_addr == $past(pc_addr));")
BAD = ("bad: assert property (@(posedge clk) disable iff (!rst_n) "
       "en |=> pc_addr == $past(pc_addr) + 4'd2);")


@pytest.fixture(scope="module")
def counter():
    return curate([parse_design(COUNTER, name="counter")]).kept[0]


def test_increment_property_holds(counter):
    report = holds_on_design(parse_assertion(INC), counter,
                             Bound(max_len=4))
    assert report.outcome is Outcome.HOLDS
    assert not report.tautology_flag
    assert report.enumerated > 0


def test_corrupted_property_fails_with_minimal_witness(counter):
    report = holds_on_design(parse_assertion(BAD), counter,
                             Bound(max_len=4))
    assert report.outcome is Outcome.FAILS
    # shortest possible violation: reset tick + enable tick + check tick
    assert report.witness.length == 3
    rows = report.witness.to_rows()
    assert rows[1]["en"] == 1 and rows[1]["rst_n"] == 1
    assert (rows[2]["pc_addr"] - rows[1]["pc_addr"]) % 16 == 1


def test_witness_replays_to_a_failure(counter):
    from svaforge.traces import Verdict, eval_assertion

    report = holds_on_design(parse_assertion(BAD), counter,
                             Bound(max_len=4))
    assert eval_assertion(parse_assertion(BAD),
                          report.witness).verdict is Verdict.FAIL


def test_unknown_signal_rejected(counter):
    ghost = parse_assertion(
        "x: assert property (@(posedge clk) ghost |-> en);")
    with pytest.raises(UnknownSignal):
        holds_on_design(ghost, counter)


def test_equivalence_fast_path_ignores_labels(counter):
    a = parse_assertion(INC)
    b = parse_assertion(INC.replace("inc:", "other_name:"))
    report = equivalent(a, b, Bound(max_len=4), design=counter)
    assert report.outcome is Outcome.EQUIVALENT
    assert report.enumerated == 0  # structural fast path


def test_design_mode_distinguishes(counter):
    report = equivalent(parse_assertion(INC), parse_assertion(HOLD),
                        Bound(max_len=4), design=counter)
    assert report.outcome is Outcome.DISTINGUISHED
    assert report.witness is not None
    assert set(report.witness_verdicts) <= {"pass", "fail", "undetermined"}


def test_free_mode_distinguishes_polarity():
    a = parse_assertion("x: assert property (@(posedge clk) a |-> b);")
    b = parse_assertion("x: assert property (@(posedge clk) !a |-> b);")
    report = equivalent(a, b, Bound(max_len=3), widths={"a": 1, "b": 1})
    assert report.outcome is Outcome.DISTINGUISHED
    assert report.witness.length == 1  # smallest witness first


def test_free_tautology_detects_trivial_truth():
    taut = parse_assertion("x: assert property (@(posedge clk) 1'b1);")
    assert free_tautology(taut, Bound(max_len=3), {})
    nontaut = parse_assertion("x: assert property (@(posedge clk) a);")
    assert not free_tautology(nontaut, Bound(max_len=3), {"a": 1})


def test_bound_exceeded_is_checked_upfront():
    a = parse_assertion("x: assert property (@(posedge clk) v == 0);")
    with pytest.raises(BoundExceeded) as err:
        free_tautology(a, Bound(max_len=4, max_states=100), {"v": 30})
    assert err.value.states_needed > err.value.max_states


def test_design_trace_cache_reuses_results(counter):
    first = design_traces(counter, Bound(max_len=3))
    second = design_traces(counter, Bound(max_len=3))
    assert first is second
    # lengths are stimulus lengths plus the one-tick reset preamble
    assert {t.length for t in first} == {2, 3, 4}


def test_random_pairs_agree_with_reference(counter):
    rng = random.Random(11)
    widths = {"a": 1, "b": 1, "c": 1}
    for _ in range(40):
        a1 = rand_assertion(rng, label="p")
        a2 = rand_assertion(rng, label="q")
        report = equivalent(a1, a2, Bound(max_len=3), widths=widths)
        ref_agree = all(
            ref_verdict(a1, steps, widths) == ref_verdict(a2, steps, widths)
            for steps in ref_all_traces(("a", "b", "c"), 3))
        expected = Outcome.EQUIVALENT if ref_agree else Outcome.DISTINGUISHED
        assert report.outcome is expected


def test_equivalence_is_reflexive_and_symmetric():
    rng = random.Random(12)
    widths = {"a": 1, "b": 1, "c": 1}
    for _ in range(20):
        a1 = rand_assertion(rng, label="p")
        a2 = rand_assertion(rng, label="q")
        assert equivalent(a1, a1, Bound(max_len=3),
                          widths=widths).outcome is Outcome.EQUIVALENT
        fwd = equivalent(a1, a2, Bound(max_len=3), widths=widths).outcome
        rev = equivalent(a2, a1, Bound(max_len=3), widths=widths).outcome
        assert fwd is rev


# -- external tool adapter ---------------------------------------------------

def _adapter(command, patterns=None, codes=None):
    return ExternalAdapter(command=command,
                           stdout_patterns=patterns or
                           {"equivalent": r"^EQUIV", "distinguished": r"^DIFF"},
                           exit_code_map=codes or {})


def test_external_check_parses_stdout():
    a = parse_assertion("x: assert property (@(posedge clk) a |-> b);")
    report = external_check(_adapter("echo EQUIVALENT"), a1=a, a2=a)
    assert report.outcome is Outcome.EQUIVALENT


def test_external_check_exit_code_map():
    a = parse_assertion("x: assert property (@(posedge clk) a |-> b);")
    adapter = _adapter("sh -c 'exit 4'", codes={4: "distinguished"})
    report = external_check(adapter, a1=a, a2=a)
    assert report.outcome is Outcome.DISTINGUISHED


def test_external_check_unmatched_output():
    a = parse_assertion("x: assert property (@(posedge clk) a |-> b);")
    with pytest.raises(UnparseableToolOutput):
        external_check(_adapter("echo gibberish"), a1=a, a2=a)


def test_external_check_missing_tool():
    a = parse_assertion("x: assert property (@(posedge clk) a |-> b);")
    with pytest.raises(ToolUnavailable):
        external_check(_adapter("/nonexistent/prover {file1}"), a1=a)
