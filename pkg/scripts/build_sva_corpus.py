#!/usr/bin/env python3
"""Regenerate the bundled assertion corpus (one assertion per line).

Every line is checked to parse and to survive a parse -> print -> parse
round trip before the file is written, so corpus-based tests cannot rot.
"""

from pathlib import Path

from svaforge.sva import parse_assertion, print_assertion

CLOCKS = ["clk", "i_clk", "core_clk"]
RESETS = ["rst", "tb_reset", "!rst_n"]

HAND_WRITTEN = [
    "a1: assert property (@(posedge clk) disable iff (rst) req |-> gnt);",
    "a2: assert property (@(posedge clk) disable iff (rst) req |=> gnt);",
    "a3: assert property (@(posedge clk) valid && ready |-> ##1 done);",
    "a4: assert property (@(posedge clk) start |-> ##[1:3] busy);",
    "a5: assert property (@(posedge clk) disable iff (!rst_n) en |=> cnt == $past(cnt) + 4'd1);",
    "a6: assert property (@(posedge clk) disable iff (!rst_n) !en |=> cnt == $past(cnt));",
    "a7: assert property (@(posedge clk) $rose(req) |-> ##2 ack);",
    "a8: assert property (@(posedge clk) $fell(busy) |-> idle);",
    "a9: assert property (@(posedge clk) $stable(mode) |-> !cfg_err);",
    "a10: assert property (@(posedge clk) req [*2] |-> gnt);",
    "a11: assert property (@(posedge clk) req [*1:3] |=> gnt);",
    "a12: assert property (@(posedge clk) not (req && !gnt));",
    "a13: assert property (@(posedge clk) (req |-> gnt) and (gnt |-> ack));",
    "a14: assert property (@(posedge clk) (err |-> halt) or (retry |-> resume));",
    "a15: assert property (@(negedge clk) wr_en |-> !rd_en);",
    "a16: assert property (@(posedge clk) disable iff (rst) full |-> !push);",
    "a17: assert property (@(posedge clk) disable iff (rst) empty |-> !pop);",
    "a18: assert property (@(posedge clk) addr < 8'd64);",
    "a19: assert property (@(posedge clk) data[7:4] == 4'h0 |-> parity == 1'b0);",
    "a20: assert property (@(posedge clk) sel == 2'b01 |-> out1);",
    "a21: assert property (@(posedge clk) (a ^ b) == c);",
    "a22: assert property (@(posedge clk) state != 3'd7);",
    "a23: assert property (@(posedge clk) grant0 && grant1 |-> 1'b0);",
    "a24: assert property (@(posedge clk) fifo_cnt <= 4'd8);",
    "a25: assert property (@(posedge clk) start ##1 run ##1 stop |-> done);",
    "a26: assert property (@(posedge clk) ##1 init_done);",
    "a27: assert property (@(posedge clk) disable iff (tb_reset) (cmd_valid && !busy) |=> busy);",
    "a28: assert property (@(posedge i_clk) disable iff (tb_reset) ctrl_comp |-> (term == (~mux_out + 1)));",
    "a29: assert property (@(posedge clk) (x + y) >= x);",
    "a30: assert property (@(posedge clk) (val << 1) == val * 2);"
    .replace("* 2", "+ val"),
    "a31: assert property (@(posedge clk) mask & req_vec |-> grant_vec != 8'd0);",
    "a32: assert property (@(posedge clk) ($past(wr, 2) && wr) |-> throttle);",
]


def generated():
    out = []
    idx = 100
    signals = [("req", "ack"), ("valid", "ready"), ("start", "done"),
               ("push", "full"), ("pop", "empty"), ("irq", "srv")]
    for clock in CLOCKS:
        for reset in RESETS:
            for a, b in signals[:2]:
                out.append(f"g{idx}: assert property (@(posedge {clock}) "
                           f"disable iff ({reset}) {a} |=> {b});")
                idx += 1
    for i, (a, b) in enumerate(signals):
        out.append(f"g{200 + i}: assert property (@(posedge clk) "
                   f"{a} && !{b} |-> ##[1:2] {b});")
    return out


def main():
    lines = HAND_WRITTEN + generated()
    for line in lines:
        first = parse_assertion(line)
        again = parse_assertion(print_assertion(first))
        assert again == first, f"round trip failed: {line}"
    assert len(lines) >= 50, len(lines)
    out = Path(__file__).resolve().parents[1] / "src" / "svaforge" / \
        "data" / "sva_corpus.txt"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} assertions to {out}")


if __name__ == "__main__":
    main()
