#!/usr/bin/env python3
"""Regenerate the bundled mock-backend fixture.

Runs the full pipeline on the bundled 3-design manifest with a
rule-based responder plugged in as the backend, recording every
(template_id, prompt_hash, sample_index) -> response triple the run
actually requests. The resulting JSONL is what the shipped mock backend
replays, so the scripted drop scenario below stays reproducible:

  counter:0   survives everything (kept; 4/5 difficulty samples easy)
  counter:1   dropped at bidirectional (inequivalent re-translation)
  counter:2   dropped at generate_verify (fails on the design)
  cmd_ctrl:0  survives everything (kept; 1/5 difficulty samples parse)
  cmd_ctrl:1  dropped at generate_verify (tautology)
  cmd_ctrl:2  dropped at generate_verify (unparseable)
  toggler:0   dropped at difficulty (5/5 samples equivalent)
  toggler:1   dropped at judge (logical misalignment)
"""

import json
import shutil
import tempfile
from pathlib import Path

from svaforge.gateway import (AuditLog, BackendProfile, LlmClient,
                              prompt_hash)
from svaforge.pipeline import StageConfig, run
from svaforge.verify import Bound

PKG_DATA = Path(__file__).resolve().parents[1] / "src" / "svaforge" / "data"
MANIFEST = PKG_DATA / "designs" / "manifest.jsonl"
FIXTURE = PKG_DATA / "mock_fixture.jsonl"

# -- scripted content --------------------------------------------------------

PROPS = {
    "counter": [
        "When the enable signal is high, the program counter must increment its address by 1 on the next clock cycle.",
        "When disabled, the counter must hold its value.",
        "The counter address must never exceed 1.",
    ],
    "cmd_ctrl": [
        "A valid command received when idle must drive the busy flag high on the next clock.",
        "The controller must always acknowledge commands.",
        "A busy controller must return to idle on the following cycle.",
    ],
    "toggler": [
        "When the toggle input is low, the state must hold its value.",
        "The state must invert whenever the toggle input is high.",
    ],
}

BACK_NL = {
    ("counter", 0): "When enable is asserted, the program counter address must increase by one at the next clock edge.",
    ("counter", 1): "When the enable input is low, the counter output must keep its previous value.",
    ("cmd_ctrl", 0): "When a command is issued while the controller is idle, the controller must become busy in the next cycle.",
    ("toggler", 0): "When toggle is deasserted, the state register must retain its value.",
    ("toggler", 1): "Whenever toggle is asserted, the state register must invert on the next cycle.",
}

C0_BODY = "@(posedge clk) disable iff (!rst_n) en |=> pc_addr == $past(pc_addr) + 4'd1"
C1_BODY = "@(posedge clk) disable iff (!rst_n) !en |=> pc_addr == $past(pc_addr)"
CM0_BODY = "@(posedge clk) disable iff (reset) (cmd_valid && !busy) |=> busy"
T0_BODY = "@(posedge clk) disable iff (!rst_n) !toggle |=> state == $past(state)"
T1_BODY = "@(posedge clk) disable iff (!rst_n) toggle |=> state == !$past(state)"


def fenced(label, body):
    return f"```\n{label}: assert property ({body});\n```"


# Greedy translations of the decomposed properties (stage generate_verify).
FIRST_SVA = {
    PROPS["counter"][0]: fenced("inc_p", C0_BODY),
    PROPS["counter"][1]: fenced("hold_p", C1_BODY),
    PROPS["counter"][2]: fenced(
        "cap_p", "@(posedge clk) disable iff (!rst_n) pc_addr <= 4'd1"),
    PROPS["cmd_ctrl"][0]: fenced("asrt", CM0_BODY),
    PROPS["cmd_ctrl"][1]: fenced(
        "ack_p", "@(posedge clk) disable iff (reset) 1'b1"),
    PROPS["cmd_ctrl"][2]:
        "The controller acknowledges commands by design; no assertion is required.",
    PROPS["toggler"][0]: fenced("hold_t", T0_BODY),
    PROPS["toggler"][1]: fenced("tog_p", T1_BODY),
}

# Re-translations of the back-translated NL (bidirectional, sample 0) and
# weak-model samples for the same prompt (difficulty, samples 1..4).
SECOND_SVA = {
    BACK_NL[("counter", 0)]: [
        fenced("inc_chk", C0_BODY),  # equivalent -> pair kept
        fenced("w1", C0_BODY),
        fenced("w2", C0_BODY),
        fenced("w3", C0_BODY),
        "I cannot express this one as a single assertion.",  # 4/5 -> keep
    ],
    BACK_NL[("counter", 1)]: [
        # wrong polarity: distinguishable on the design -> record dropped
        fenced("hold_chk",
               "@(posedge clk) disable iff (!rst_n) en |=> pc_addr == $past(pc_addr)"),
    ],
    BACK_NL[("cmd_ctrl", 0)]: [
        fenced("asrt_chk", CM0_BODY),  # equivalent -> pair kept
        "A controller should respond to commands promptly.",
        "No formal property is needed here.",
        "busy must eventually rise (cannot encode).",
        "See the design documentation.",  # only 1/5 parses -> keep
    ],
    BACK_NL[("toggler", 0)]: [
        fenced("hold_t_chk", T0_BODY),
        fenced("s1", T0_BODY),
        fenced("s2", T0_BODY),
        fenced("s3", T0_BODY),
        fenced("s4", T0_BODY),  # 5/5 equivalent -> dropped as trivial
    ],
    BACK_NL[("toggler", 1)]: [
        fenced("tog_chk", T1_BODY),
    ],
}

JUDGE = {
    BACK_NL[("counter", 0)]:
        "The sentence and the assertion both describe an enable-gated "
        "increment of one.\nVERDICT: ACCEPT",
    BACK_NL[("cmd_ctrl", 0)]:
        "The pair is consistent with the handshake in the design.\n"
        "VERDICT: ACCEPT",
    BACK_NL[("toggler", 0)]:
        "Hold-when-idle is exactly what the assertion checks.\n"
        "VERDICT: ACCEPT",
    BACK_NL[("toggler", 1)]:
        "The sentence requires an inversion but the assertion compares "
        "against the inverted past value only when toggle is high at the "
        "wrong cycle.\nVERDICT: REJECT(logical misalignment)",
}

REASON = {
    BACK_NL[("counter", 0)]:
        "<think>The enable-gated increment maps to an overlapped antecedent "
        "on en with a next-cycle comparison against the past value plus "
        "one, guarded by the active-low reset.</think>\n"
        + fenced("inc_final", C0_BODY),
    BACK_NL[("cmd_ctrl", 0)]:
        "<think>Idle is the negation of busy; a valid command while idle "
        "must raise busy one cycle later, so a non-overlapped implication "
        "fits, disabled during reset.</think>\n"
        + fenced("asrt_final", CM0_BODY),
}


def respond(template_id: str, rendered: str, index: int) -> str:
    if template_id == "property_analysis":
        for name, props in PROPS.items():
            if f"module {name}(" in rendered:
                return "\n".join(f"Property {i + 1}: {p}"
                                 for i, p in enumerate(props))
        raise KeyError("unknown design in analysis prompt")
    if template_id == "nl2sva":
        for nl, resp in FIRST_SVA.items():
            if nl in rendered:
                return resp
        for nl, samples in SECOND_SVA.items():
            if nl in rendered:
                return samples[min(index, len(samples) - 1)]
        raise KeyError("unknown property in nl2sva prompt")
    if template_id == "sva2nl":
        for key, nl in BACK_NL.items():
            design, i = key
            if PROPS[design][i] and FIRST_SVA[PROPS[design][i]].startswith(
                    "```"):
                label = FIRST_SVA[PROPS[design][i]].split(":")[0].strip("`\n ")
                if f"{label}: assert" in rendered:
                    return nl
        raise KeyError("unknown assertion in sva2nl prompt")
    if template_id == "judge":
        for nl, resp in JUDGE.items():
            if nl in rendered:
                return resp
        raise KeyError("unknown pair in judge prompt")
    if template_id == "reasoning":
        for nl, resp in REASON.items():
            if nl in rendered:
                return resp
        raise KeyError("unknown property in reasoning prompt")
    raise KeyError(template_id)


class RecordingBackend:
    def __init__(self, rows: dict):
        self.rows = rows

    def generate(self, template_id, rendered, sampling, n_samples):
        h = prompt_hash(template_id, rendered)
        out = []
        for i in range(n_samples):
            text = respond(template_id, rendered, i)
            key = (template_id, h, i)
            if key in self.rows and self.rows[key] != text:
                raise RuntimeError(f"conflicting response for {key}")
            self.rows[key] = text
            out.append((text, 0))
        return out


def main():
    rows: dict = {}
    cfg = StageConfig(
        bound=Bound(max_len=4),
        backends={role: BackendProfile(name=role, kind="mock",
                                       fixture=str(FIXTURE))
                  for role in ("generator", "back_translator", "judge",
                               "weak", "reasoner")},
    )
    client = LlmClient(audit=AuditLog(),
                       backend_factory=lambda p: RecordingBackend(rows))
    workdir = Path(tempfile.mkdtemp(prefix="fixture_build_"))
    try:
        summary = run(MANIFEST, cfg, workdir, client)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)
    expected = {
        "curate": 8, "generate_verify": 5, "bidirectional": 4,
        "judge": 3, "difficulty": 2, "reasoning": 2,
    }
    for stage, alive in expected.items():
        got = summary[stage]["alive"]
        assert got == alive, f"{stage}: expected {alive} alive, got {got}"
    assert summary["export"]["exported"] == 2, summary["export"]
    lines = [json.dumps({"template_id": t, "prompt_hash": h,
                         "sample_index": i, "response": resp},
                        sort_keys=True)
             for (t, h, i), resp in sorted(rows.items())]
    FIXTURE.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} fixture rows to {FIXTURE}")
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
