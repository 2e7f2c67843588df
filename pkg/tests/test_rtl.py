"""RTL subset parsing, clock/reset detection, and simulation."""

import pytest

from svaforge.errors import (CombinationalCycle, MultipleDrivers, ParseError,
                             UnknownSignal, UnsupportedConstruct,
                             WidthMismatch)
from svaforge.rtl import (DEFAULT_RESET_PATTERNS, curate, detect_clock_reset,
                          parse_design, simulate)

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


def curated(src, name="dut"):
    d = parse_design(src, name=name)
    result = curate([d])
    assert result.kept, result.rejected
    return result.kept[0]


def test_ansi_ports_and_ranges():
    d = parse_design(COUNTER, name="counter")
    assert [p.name for p in d.ports] == ["clk", "rst_n", "en", "pc_addr"]
    assert d.width("pc_addr") == 4
    assert d.width("en") == 1


def test_ansi_direction_carries_over_bare_commas():
    d = parse_design("module m(input a, b, output reg y);\n"
                     "  always @(posedge a) y <= b;\nendmodule", name="m")
    dirs = {p.name: p.direction for p in d.ports}
    assert dirs == {"a": "input", "b": "input", "y": "output"}


def test_non_ansi_declarations():
    d = parse_design("""
module m(clk, d, q);
  input clk;
  input d;
  output reg q;
  always @(posedge clk) q <= d;
endmodule
""", name="m")
    assert {p.name for p in d.input_ports()} == {"clk", "d"}


def test_async_reset_detected_from_sensitivity_edge():
    found = detect_clock_reset(parse_design(COUNTER, name="c"))
    assert found.clock == "clk"
    assert found.reset.signal == "rst_n"
    assert found.reset.active == "low"
    assert found.reset.kind == "async"


def test_async_posedge_reset_is_active_high():
    src = """
module m(input clk, input reset, input d, output reg q);
  always @(posedge clk or posedge reset) begin
    if (reset) q <= 1'b0;
    else q <= d;
  end
endmodule
"""
    found = detect_clock_reset(parse_design(src, name="m"))
    assert (found.reset.signal, found.reset.active,
            found.reset.kind) == ("reset", "high", "async")


def test_sync_reset_matched_by_name_pattern():
    src = """
module m(input clk, input rst_n, input d, output reg q);
  always @(posedge clk) begin
    if (!rst_n) q <= 1'b0;
    else q <= d;
  end
endmodule
"""
    found = detect_clock_reset(parse_design(src, name="m"))
    assert (found.reset.signal, found.reset.active,
            found.reset.kind) == ("rst_n", "low", "sync")
    assert "rst" in DEFAULT_RESET_PATTERNS


def test_curate_rejects_designs_without_reset():
    src = ("module m(input clk, input d, output reg q);\n"
           "  always @(posedge clk) q <= d;\nendmodule")
    result = curate([parse_design(src, name="m")])
    assert result.kept == []
    assert result.rejected == [("m", "no-reset")]


def test_curate_rejects_on_clock_disagreement():
    src = """
module m(input c1, input c2, input rst, output reg a, output reg b);
  always @(posedge c1 or posedge rst) begin
    if (rst) a <= 1'b0; else a <= b;
  end
  always @(posedge c2 or posedge rst) begin
    if (rst) b <= 1'b0; else b <= a;
  end
endmodule
"""
    result = curate([parse_design(src, name="m")])
    assert result.kept == []
    assert "clock-disagreement" in result.rejected[0][1]


def test_counter_simulation_matches_hand_trace():
    d = curated(COUNTER, "counter")
    stim = [{"rst_n": 1, "en": 1}] * 3 + [{"rst_n": 1, "en": 0}] + \
        [{"rst_n": 1, "en": 1}]
    trace = simulate(d, stim, reset_ticks=1)
    # tick 0 is the forced-reset tick; increments land one tick later
    assert [trace.value("pc_addr", t) for t in range(5)] == [0, 0, 1, 2, 2]


def test_wraparound_at_width():
    d = curated(COUNTER, "counter")
    stim = [{"rst_n": 1, "en": 1}] * 18
    trace = simulate(d, stim, reset_ticks=1)
    assert trace.value("pc_addr", 16) == 15
    assert trace.value("pc_addr", 17) == 0


def test_mid_trace_reset_reapplies_zero():
    d = curated(COUNTER, "counter")
    stim = [{"rst_n": 1, "en": 1}] * 3 + [{"rst_n": 0, "en": 1},
                                          {"rst_n": 1, "en": 1}]
    trace = simulate(d, stim, reset_ticks=1)
    assert trace.value("pc_addr", 4) == 0


def test_assigns_settle_in_topological_order():
    src = """
module m(input clk, input rst, input x, output reg q);
  wire mid;
  wire out;
  assign out = mid ^ x;
  assign mid = x & x;
  always @(posedge clk or posedge rst) begin
    if (rst) q <= 1'b0;
    else q <= out;
  end
endmodule
"""
    d = curated(src)
    trace = simulate(d, [{"rst": 0, "x": 1}, {"rst": 0, "x": 1}])
    assert trace.value("out", 0) == 0  # 1 & 1 ^ 1


def test_combinational_cycle_is_reported():
    src = """
module m(input clk, input rst, output reg q);
  wire a;
  wire b;
  assign a = b;
  assign b = a;
  always @(posedge clk or posedge rst) begin
    if (rst) q <= 1'b0; else q <= a;
  end
endmodule
"""
    d = curated(src)
    with pytest.raises(CombinationalCycle):
        simulate(d, [{"rst": 0}])


def test_multiple_drivers_rejected():
    src = """
module m(input clk, input rst, output reg q);
  always @(posedge clk or posedge rst) begin
    if (rst) q <= 1'b0; else q <= 1'b1;
  end
  always @(posedge clk or posedge rst) begin
    if (rst) q <= 1'b0; else q <= 1'b0;
  end
endmodule
"""
    with pytest.raises(MultipleDrivers):
        parse_design(src, name="m")


@pytest.mark.parametrize("body,exc", [
    ("initial q = 0;", UnsupportedConstruct),
    ("generate endgenerate", UnsupportedConstruct),
    ("always @(posedge clk) q = d;", UnsupportedConstruct),  # blocking
    ("sub u0(clk);", UnsupportedConstruct),
])
def test_out_of_subset_module_items(body, exc):
    src = (f"module m(input clk, input d, output reg q);\n{body}\n"
           "endmodule")
    with pytest.raises(exc):
        parse_design(src, name="m")


def test_second_module_rejected():
    src = ("module a(input clk); endmodule\n"
           "module b(input clk); endmodule")
    with pytest.raises(ParseError):
        parse_design(src, name="a")


def test_stimulus_must_cover_every_input():
    d = curated(COUNTER, "counter")
    with pytest.raises(UnknownSignal):
        simulate(d, [{"rst_n": 1}])


def test_stimulus_width_checked():
    d = curated(COUNTER, "counter")
    with pytest.raises(WidthMismatch):
        simulate(d, [{"rst_n": 1, "en": 2}])
