"""Bounded explicit-enumeration verification.

Two checks: whether an assertion holds on a design (over every input
stimulus up to a length bound) and whether two assertions are bounded-
equivalent (identical three-valued verdicts on every trace up to the
bound, either over free signal valuations or over design-reachable
traces). This is the desk-scale stand-in for a commercial prover; every
report carries the bound it was computed under.

Free-mode enumeration is quotiented exactly: two single-tick valuations
are interchangeable when they agree on every signal that feeds a
sampled-value function and on the truth of every other boolean leaf, so
only one representative per class is enumerated. Witnesses are smallest
by (length, lexicographic valuation) among class representatives.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (BoundExceeded, ToolUnavailable, UnknownSignal,
                     UnparseableToolOutput)
from .rtl.ast import DesignUnit
from .rtl.sim import simulate
from .sva import ast as sva_ast
from .sva.printer import print_assertion
from .traces import (AttemptStatus, Trace, Verdict, eval_assertion,
                     eval_bool, make_trace)


@dataclass(frozen=True)
class Bound:
    max_len: int = 6  # trace/stimulus length ceiling
    max_states: int = 1 << 22  # abort guard on enumeration size

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")


class Outcome(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    EQUIVALENT = "equivalent"
    DISTINGUISHED = "distinguished"


@dataclass
class CheckReport:
    outcome: Outcome
    bound: Bound
    witness: Optional[Trace] = None  # counterexample or distinguishing trace
    tautology_flag: bool = False
    attempts_vacuous: int = 0
    undetermined: int = 0
    enumerated: int = 0
    notes: List[str] = field(default_factory=list)
    witness_verdicts: Optional[Tuple[str, str]] = None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "bound": {"max_len": self.bound.max_len,
                      "max_states": self.bound.max_states},
            "tautology_flag": self.tautology_flag,
            "attempts_vacuous": self.attempts_vacuous,
            "undetermined": self.undetermined,
            "enumerated": self.enumerated,
            "notes": self.notes,
            "witness_verdicts": list(self.witness_verdicts or ()) or None,
            "witness": self.witness.to_rows() if self.witness else None,
            "witness_signals": [list(s) for s in self.witness.signals]
            if self.witness else None,
        }


# --------------------------------------------------------------------------
# Free-trace enumeration
# --------------------------------------------------------------------------

def _strip_label(a: sva_ast.Assertion) -> sva_ast.Assertion:
    return sva_ast.Assertion("x", a.clock, a.disable, a.body)


def _has_sampled(e: sva_ast.BoolExpr) -> bool:
    return any(isinstance(n, (sva_ast.Past, sva_ast.Rose, sva_ast.Fell,
                              sva_ast.Stable))
               for n in sva_ast.walk_bool(e))


def _leaves_of(a: sva_ast.Assertion) -> List[sva_ast.BoolExpr]:
    leaves = list(sva_ast.bool_leaves(a.body))
    if a.disable is not None:
        leaves.append(a.disable)
    return leaves


def _free_classes(assertions: Sequence[sva_ast.Assertion],
                  widths: Dict[str, int], bound: Bound):
    """One representative valuation per equivalence class of single-tick
    valuations, in lexicographic order of the representative."""
    clock_names = {a.clock.signal for a in assertions}
    sig_order: List[str] = []
    for a in assertions:
        for name in sva_ast.signals_of(a):
            if name not in sig_order:
                sig_order.append(name)
    exact: set = set()
    atoms: List[sva_ast.BoolExpr] = []
    seen_atoms: set = set()
    for a in assertions:
        for leaf in _leaves_of(a):
            if _has_sampled(leaf):
                exact.update(sva_ast.signals_of_expr(leaf))
            elif leaf not in seen_atoms:
                seen_atoms.add(leaf)
                atoms.append(leaf)
    body_sigs = set()
    for a in assertions:
        for leaf in _leaves_of(a):
            body_sigs.update(sva_ast.signals_of_expr(leaf))
    enum_sigs = [s for s in sig_order
                 if s in body_sigs or s not in clock_names]
    for s in enum_sigs:
        if s not in widths:
            raise UnknownSignal(s)
    total = 1
    for s in enum_sigs:
        total *= 1 << widths[s]
        if total > bound.max_states:
            raise BoundExceeded(total, bound.max_states)
    decl = [(s, widths[s]) for s in enum_sigs]
    for c in sorted(clock_names - set(enum_sigs)):
        decl.append((c, widths.get(c, 1)))
    exact_list = [s for s in enum_sigs if s in exact]
    classes: List[dict] = []
    seen_keys: set = set()
    for values in itertools.product(*(range(1 << widths[s]) for s in enum_sigs)):
        step = dict(zip(enum_sigs, values))
        for c in clock_names - set(enum_sigs):
            step[c] = 1
        probe = make_trace(decl, [step])
        key = (tuple(step[s] for s in exact_list),
               tuple(bool(eval_bool(atom, probe, 0)) for atom in atoms))
        if key not in seen_keys:
            seen_keys.add(key)
            classes.append(step)
    return decl, classes


def _free_traces(decl, classes, bound: Bound) -> Iterable[Trace]:
    per_len = len(classes)
    total = 0
    for length in range(1, bound.max_len + 1):
        total += per_len ** length
    if total > bound.max_states:
        raise BoundExceeded(total, bound.max_states)
    for length in range(1, bound.max_len + 1):
        for steps in itertools.product(classes, repeat=length):
            yield make_trace(decl, steps)


# --------------------------------------------------------------------------
# Design-trace enumeration (cached per design/bound)
# --------------------------------------------------------------------------

_DESIGN_TRACE_CACHE: Dict[tuple, List[Trace]] = {}


def _design_key(d: DesignUnit, bound: Bound, reset_ticks: int) -> tuple:
    digest = hashlib.sha256(d.source.encode()).hexdigest()
    return (d.name, digest, bound.max_len, bound.max_states, reset_ticks)


def design_traces(d: DesignUnit, bound: Bound, reset_ticks: int = 1) -> List[Trace]:
    """All design-reachable traces for stimuli of lengths 1..max_len
    (after the reset preamble), in (length, lexicographic) order."""
    key = _design_key(d, bound, reset_ticks)
    cached = _DESIGN_TRACE_CACHE.get(key)
    if cached is not None:
        return cached
    inputs = [p for p in d.input_ports() if p.name != d.clock]
    per_tick = 1
    for p in inputs:
        per_tick *= 1 << p.width
    total = 0
    for length in range(1, bound.max_len + 1):
        total += per_tick ** length
        if total > bound.max_states:
            raise BoundExceeded(total, bound.max_states)
    tick_values = [dict(zip([p.name for p in inputs], vals))
                   for vals in itertools.product(
                       *(range(1 << p.width) for p in inputs))]
    traces: List[Trace] = []
    for length in range(1, bound.max_len + 1):
        for stim in itertools.product(tick_values, repeat=length):
            preamble = [dict(stim[0])] * reset_ticks
            traces.append(simulate(d, preamble + [dict(s) for s in stim],
                                   reset_ticks=reset_ticks))
    _DESIGN_TRACE_CACHE[key] = traces
    return traces


def _check_signals_on_design(a: sva_ast.Assertion, d: DesignUnit):
    for name in sva_ast.signals_of(a):
        if not d.has_signal(name):
            raise UnknownSignal(name)


# --------------------------------------------------------------------------
# Public checks
# --------------------------------------------------------------------------

def holds_on_design(a: sva_ast.Assertion, d: DesignUnit,
                    bound: Bound = Bound(), reset_ticks: int = 1) -> CheckReport:
    """FAILS with the smallest counterexample if any bounded stimulus
    violates the assertion, else HOLDS (with vacuity statistics and a
    free-tautology flag)."""
    _check_signals_on_design(a, d)
    report = CheckReport(Outcome.HOLDS, bound)
    for trace in design_traces(d, bound, reset_ticks):
        report.enumerated += 1
        result = eval_assertion(a, trace)
        report.attempts_vacuous += result.count(AttemptStatus.VACUOUS)
        if result.verdict is Verdict.FAIL:
            report.outcome = Outcome.FAILS
            report.witness = trace
            return report
        if result.verdict is Verdict.UNDETERMINED:
            report.undetermined += 1
    widths = {n.name: n.width for n in d.nets}
    try:
        report.tautology_flag = free_tautology(a, bound, widths)
    except BoundExceeded as exc:
        report.notes.append(f"tautology check skipped: {exc}")
    return report


def equivalent(a1: sva_ast.Assertion, a2: sva_ast.Assertion,
               bound: Bound = Bound(), design: Optional[DesignUnit] = None,
               widths: Optional[Dict[str, int]] = None,
               reset_ticks: int = 1) -> CheckReport:
    """Bounded three-valued equivalence.

    Design mode (``design`` given) compares verdicts on design-reachable
    traces; free mode compares on all valuations of the union signal set
    (widths from the table). Labels never influence the outcome.
    """
    report = CheckReport(Outcome.EQUIVALENT, bound)
    if _strip_label(a1) == _strip_label(a2):
        report.notes.append("structurally identical modulo label")
        return report
    if design is not None:
        _check_signals_on_design(a1, design)
        _check_signals_on_design(a2, design)
        traces: Iterable[Trace] = design_traces(design, bound, reset_ticks)
    else:
        decl, classes = _free_classes([a1, a2], widths or {}, bound)
        traces = _free_traces(decl, classes, bound)
    for trace in traces:
        report.enumerated += 1
        v1 = eval_assertion(a1, trace).verdict
        v2 = eval_assertion(a2, trace).verdict
        if v1 is not v2:
            report.outcome = Outcome.DISTINGUISHED
            report.witness = trace
            report.witness_verdicts = (v1.value, v2.value)
            return report
    return report


def free_tautology(a: sva_ast.Assertion, bound: Bound = Bound(),
                   widths: Optional[Dict[str, int]] = None) -> bool:
    """True iff no free trace up to the bound makes the assertion FAIL."""
    decl, classes = _free_classes([a], widths or {}, bound)
    for trace in _free_traces(decl, classes, bound):
        if eval_assertion(a, trace).verdict is Verdict.FAIL:
            return False
    return True


# --------------------------------------------------------------------------
# External-prover adapter
# --------------------------------------------------------------------------

@dataclass
class ExternalAdapter:
    """Shell adapter for a real formal tool.

    ``command`` may use {file1} {file2} {design} placeholders. Exit codes
    found in ``exit_code_map`` map straight to an outcome name; exit 0
    otherwise means "parse stdout" against ``stdout_patterns``
    (outcome-name -> regex). Any other exit means the tool is unusable.
    """

    command: str
    stdout_patterns: Dict[str, str]
    exit_code_map: Dict[int, str] = field(default_factory=dict)
    timeout: float = 300.0

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExternalAdapter":
        return cls(command=cfg["command"],
                   stdout_patterns=dict(cfg.get("stdout_patterns", {})),
                   exit_code_map={int(k): v for k, v in
                                  cfg.get("exit_code_map", {}).items()},
                   timeout=float(cfg.get("timeout", 300.0)))


def external_check(adapter: ExternalAdapter,
                   a1: Optional[sva_ast.Assertion] = None,
                   a2: Optional[sva_ast.Assertion] = None,
                   design: Optional[DesignUnit] = None,
                   bound: Bound = Bound()) -> CheckReport:
    """Delegate a check to a configured external tool and map its verdict."""
    with tempfile.TemporaryDirectory(prefix="svaforge_ext_") as tmp:
        tmp_path = Path(tmp)
        subst = {}
        if a1 is not None:
            f1 = tmp_path / "a1.sva"
            f1.write_text(print_assertion(a1) + "\n")
            subst["file1"] = str(f1)
        if a2 is not None:
            f2 = tmp_path / "a2.sva"
            f2.write_text(print_assertion(a2) + "\n")
            subst["file2"] = str(f2)
        if design is not None:
            dv = tmp_path / "design.v"
            dv.write_text(design.source)
            subst["design"] = str(dv)
        argv = [part.format_map(_Defaulting(subst))
                for part in shlex.split(adapter.command)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  timeout=adapter.timeout)
        except FileNotFoundError as exc:
            raise ToolUnavailable(str(exc)) from exc
        except subprocess.TimeoutExpired as exc:
            raise ToolUnavailable(f"timeout after {adapter.timeout}s") from exc
    name = adapter.exit_code_map.get(proc.returncode)
    if name is None:
        if proc.returncode != 0:
            raise ToolUnavailable(
                f"exit code {proc.returncode}: {proc.stderr.strip()[:200]}")
        name = _match_stdout(adapter, proc.stdout)
    try:
        outcome = Outcome(name.lower())
    except ValueError as exc:
        raise UnparseableToolOutput(f"unknown outcome name {name!r}") from exc
    report = CheckReport(outcome, bound)
    report.notes.append("external tool verdict")
    return report


def _match_stdout(adapter: ExternalAdapter, stdout: str) -> str:
    for name, pattern in adapter.stdout_patterns.items():
        if re.search(pattern, stdout, re.MULTILINE):
            return name
    raise UnparseableToolOutput(
        f"no verdict pattern matched tool output: {stdout.strip()[:200]!r}")


class _Defaulting(dict):
    def __missing__(self, key):
        raise KeyError(f"command placeholder {{{key}}} has no value")
