"""Acceptance gate: nine end-to-end checks, one printed line each.

Each test records ``ACCEPTANCE <n>/9 <name>: PASS|FAIL``; the lines are
printed in the run's terminal summary (see conftest.py) so a full-suite
log always shows the per-check verdicts.
"""

import functools
import json
import math
import random
import re
import time
from fractions import Fraction
from pathlib import Path

from conftest import ACCEPTANCE_LINES
from generators import rand_assertion
from oracles import ref_all_traces, ref_tfidf_diversity, ref_verdict
from svaforge.config import load_config
from svaforge.gateway import (AuditLog, BackendProfile, CallableBackend,
                              LlmClient)
from svaforge.metrics import (EvalResult, decontaminate, func_at_k,
                              tfidf_diversity)
from svaforge.pipeline import (STAGES, PipelineRecord, StageConfig, run,
                               stage_difficulty)
from svaforge.rtl import curate, parse_design
from svaforge.sva import ast as A
from svaforge.sva import parse_assertion, print_assertion
from svaforge.sva.lexer import tokenize_loose
from svaforge.traces import Verdict, eval_assertion
from svaforge.verify import (Bound, Outcome, design_traces, equivalent,
                             free_tautology, holds_on_design)

DATA = Path(__file__).resolve().parents[1] / "src" / "svaforge" / "data"

NESTED_IMPL = (
    "asrt_term_complement: assert property (@(posedge i_clk) "
    "disable iff (tb_reset) ctrl_comp |-> (term == (~mux_out + 1)) "
    "and !ctrl_comp |-> (term == mux_out));"
)
PAREN_FIX = NESTED_IMPL.replace(
    "ctrl_comp |-> (term == (~mux_out + 1)) and !ctrl_comp |-> "
    "(term == mux_out)",
    "(ctrl_comp |-> (term == (~mux_out + 1))) and (!ctrl_comp |-> "
    "(term == mux_out))")
WIDTHS = {"tb_reset": 1, "ctrl_comp": 1, "term": 4, "mux_out": 4}


def acceptance(num, name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_LINES.append(f"ACCEPTANCE {num}/9 {name}: FAIL")
                raise
            ACCEPTANCE_LINES.append(f"ACCEPTANCE {num}/9 {name}: PASS")
            return result
        return wrapper
    return deco


# -- 1: implication precedence trap -------------------------------------------

@acceptance(1, "precedence-trap")
def test_precedence_trap_reproduction():
    start = time.perf_counter()
    original = parse_assertion(NESTED_IMPL)
    fixed = parse_assertion(PAREN_FIX)

    # unparenthesized text parses as an implication nested in the
    # consequent, not as a conjunction of two implications
    assert isinstance(original.body, A.Implication)
    assert isinstance(original.body.consequent, A.Implication)
    assert isinstance(fixed.body, A.And)

    bound = Bound(max_len=4)
    assert free_tautology(original, bound, WIDTHS)
    assert not free_tautology(fixed, bound, WIDTHS)

    report = equivalent(original, fixed, bound, widths=WIDTHS)
    assert report.outcome is Outcome.DISTINGUISHED
    assert report.witness is not None
    v1 = eval_assertion(original, report.witness).verdict
    v2 = eval_assertion(fixed, report.witness).verdict
    assert v1 is not v2  # the witness replays to differing verdicts
    assert v1 is Verdict.PASS and v2 is Verdict.FAIL

    assert time.perf_counter() - start < 5.0


# -- 2: functional pass-rate estimator ----------------------------------------

@acceptance(2, "pass-rate-estimator")
def test_estimator_exactness():
    for n in range(1, 33):
        for c in range(0, n + 1):
            for k in (1, 16, 32):
                if k > n:
                    continue
                exact = float(1 - Fraction(math.comb(n - c, k),
                                           math.comb(n, k)))
                got = func_at_k([EvalResult("p", n, c)], k)
                assert abs(got - exact) <= 1e-12, (n, c, k)

    results = [EvalResult(f"p{i}", 32, c) for i, c in
               enumerate([0, 1, 7, 16, 31, 32])]
    assert func_at_k(results, 1) == \
        sum(r.c / r.n for r in results) / len(results)
    values = [func_at_k(results, k) for k in range(1, 33)]
    assert values == sorted(values)


# -- 3: verifier agrees with an independent brute-force oracle -----------------

@acceptance(3, "verifier-vs-oracle")
def test_verifier_agrees_with_brute_force():
    rng = random.Random(2024)
    widths = {"a": 1, "b": 1, "c": 1}
    bound = Bound(max_len=4)
    all_traces = list(ref_all_traces(("a", "b", "c"), 4))
    for _ in range(200):
        a1 = rand_assertion(rng, label="p")
        a2 = rand_assertion(rng, label="q")
        report = equivalent(a1, a2, bound, widths=widths)
        ref_agree = all(
            ref_verdict(a1, steps, widths) == ref_verdict(a2, steps, widths)
            for steps in all_traces)
        expected = Outcome.EQUIVALENT if ref_agree else Outcome.DISTINGUISHED
        assert report.outcome is expected, (print_assertion(a1),
                                            print_assertion(a2))
        assert equivalent(a1, a1, bound,
                          widths=widths).outcome is Outcome.EQUIVALENT
        assert equivalent(a2, a1, bound,
                          widths=widths).outcome is report.outcome


# -- 4: counter end-to-end ------------------------------------------------------

@acceptance(4, "counter-end-to-end")
def test_counter_end_to_end():
    start = time.perf_counter()
    src = (DATA / "designs" / "counter.v").read_text()
    counter = curate([parse_design(src, name="counter")]).kept[0]
    bound = Bound(max_len=5)

    inc = parse_assertion(
        "inc: assert property (@(posedge clk) disable iff (!rst_n) "
        "en |=> pc_addr == $past(pc_addr) + 4'd1);")
    hold = parse_assertion(
        "hold: assert property (@(posedge clk) disable iff (!rst_n) "
        "!en |=> pc_addr == $past(pc_addr));")
    bad = parse_assertion(
        "bad: assert property (@(posedge clk) disable iff (!rst_n) "
        "en |=> pc_addr == $past(pc_addr) + 4'd2);")

    assert holds_on_design(inc, counter, bound).outcome is Outcome.HOLDS
    assert holds_on_design(hold, counter, bound).outcome is Outcome.HOLDS

    report = holds_on_design(bad, counter, bound)
    assert report.outcome is Outcome.FAILS
    assert eval_assertion(bad, report.witness).verdict is Verdict.FAIL
    # minimality: no strictly shorter exercised trace fails
    for trace in design_traces(counter, bound):
        if trace.length < report.witness.length:
            assert eval_assertion(bad, trace).verdict is not Verdict.FAIL

    assert time.perf_counter() - start < 10.0


# -- 5: pipeline determinism and monotonicity ------------------------------------

@acceptance(5, "pipeline-determinism")
def test_pipeline_determinism_and_monotonicity(tmp_path):
    cfg = load_config(DATA / "mock_config.json")
    outputs, summaries = [], []
    for name in ("first", "second"):
        wd = tmp_path / name
        summaries.append(run(cfg.manifest, cfg.stage, wd,
                             LlmClient(audit=AuditLog())))
        outputs.append({p.name: p.read_bytes() for p in sorted(wd.iterdir())
                        if p.suffix in (".jsonl", ".hash")})
    assert outputs[0] == outputs[1]

    summary = summaries[0]
    alive = [summary[s]["alive"] for s in STAGES[:-1]]
    assert alive == sorted(alive, reverse=True)
    drops = sum(sum(summary[s]["dropped"].values()) for s in STAGES[:-1])
    assert alive[-1] + drops == alive[0]

    rows = [json.loads(ln) for ln in
            (tmp_path / "first" / "sft.jsonl").read_text().splitlines()]
    assert rows
    for row in rows:
        m = re.fullmatch(r"<think>(.*)</think>(.+)", row["label"], re.DOTALL)
        assert m is not None
        parse_assertion(m.group(2))


# -- 6: decontamination boundary --------------------------------------------------

@acceptance(6, "decontamination-boundary")
def test_decontamination_boundary():
    words = " ".join(f"tok{i}" for i in range(13))
    bench = [f"bench prefix {words} bench suffix"]
    overlap13 = [f"train text {words} more text"]
    assert decontaminate(overlap13, bench).dropped == overlap13

    twelve = " ".join(f"tok{i}" for i in range(12))
    overlap12 = [f"train text {twelve} zzz more text"]
    assert decontaminate(overlap12, bench).kept == overlap12

    strings = ["w " * 13, "w " * 25, "only a few tokens"]
    report = decontaminate(strings, strings)
    assert set(report.dropped) == {strings[0], strings[1]}
    assert report.kept == ["only a few tokens"]


# -- 7: diversity metric -----------------------------------------------------------

@acceptance(7, "diversity-metric")
def test_diversity_metric(tmp_path):
    assert tfidf_diversity(["x |-> y;"] * 5) == 0.0
    disjoint = ["alpha beta gamma delta", "one two three four"]
    assert abs(tfidf_diversity(disjoint) - 1.0) <= 1e-12

    corpus3 = [
        "p: assert property (@(posedge clk) a |-> b);",
        "p: assert property (@(posedge clk) a |-> c);",
        "q: assert property (@(negedge clk) x ##1 y |=> z);",
    ]
    reference = ref_tfidf_diversity([tokenize_loose(d) for d in corpus3], 3)
    assert abs(tfidf_diversity(corpus3, n_gram=3) - reference) <= 1e-12

    # size-vs-diversity curve over the bundled corpus (shape only)
    corpus = [ln for ln in (DATA / "sva_corpus.txt").read_text().splitlines()
              if ln.strip()]
    rng = random.Random(0)
    csv_lines = ["size,diversity"]
    for size in (10, 50, 100):
        pool, copy = list(corpus), 0
        while len(pool) < size:
            copy += 1
            pool += [f"v{copy}_{line}" for line in corpus]
        value = tfidf_diversity(rng.sample(pool, size), n_gram=3, seed=0)
        assert 0.0 < value <= 1.0
        csv_lines.append(f"{size},{value:.6f}")
    out = tmp_path / "diversity_curve.csv"
    out.write_text("\n".join(csv_lines) + "\n")
    assert len(out.read_text().splitlines()) == 4


# -- 8: parser round-trip ------------------------------------------------------------

@acceptance(8, "parser-round-trip")
def test_parser_round_trip():
    corpus = [ln for ln in (DATA / "sva_corpus.txt").read_text().splitlines()
              if ln.strip()]
    assert len(corpus) >= 50
    for text in corpus:
        first = parse_assertion(text)
        assert parse_assertion(print_assertion(first)) == first

    rng = random.Random(7)
    for _ in range(1000):
        first = rand_assertion(rng, label="rt")
        assert parse_assertion(print_assertion(first)) == first


# -- 9: difficulty filter -------------------------------------------------------------

TOGGLER_SVA = ("hold_t: assert property (@(posedge clk) disable iff (!rst_n) "
               "!toggle |=> state == $past(state));")


def _difficulty_record():
    rec = PipelineRecord(id="toggler:0", design_ref="toggler",
                         nl_text="state holds when toggle is low")
    rec.sva_text = TOGGLER_SVA
    return rec


def _run_difficulty(responses_by_index):
    def fn(template_id, rendered, index):
        return responses_by_index[index]

    client = LlmClient(audit=AuditLog(),
                       backend_factory=lambda p: CallableBackend(fn))
    profile = BackendProfile(name="weak", kind="mock", fixture="unused")
    cfg = StageConfig(bound=Bound(max_len=3), backends={"weak": profile},
                      difficulty_samples=5)
    src = (DATA / "designs" / "toggler.v").read_text()
    toggler = curate([parse_design(src, name="toggler")]).kept[0]
    [rec] = stage_difficulty([_difficulty_record()], cfg, client,
                             {"toggler": toggler})
    return rec


@acceptance(9, "difficulty-filter")
def test_difficulty_filter_semantics():
    equiv = ("```\ns{}: assert property (@(posedge clk) disable iff "
             "(!rst_n) !toggle |=> state == $past(state));\n```")

    all_equiv = _run_difficulty({i: equiv.format(i) for i in range(5)})
    assert not all_equiv.alive and all_equiv.drop_reason == "trivial"

    four_of_five = {i: equiv.format(i) for i in range(4)}
    four_of_five[4] = "no assertion here"
    assert _run_difficulty(four_of_five).alive

    none_parse = {i: f"prose response {i}" for i in range(5)}
    assert _run_difficulty(none_parse).alive
