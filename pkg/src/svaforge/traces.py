"""Three-valued bounded semantics for assertions over finite sampled traces.

A trace is a fixed-length sequence of signal valuations sampled at clock
ticks. One assertion attempt starts at every tick; each attempt resolves
to satisfied / failed / vacuous, is discarded as disabled, or is still
pending when the trace runs out. The trace-level verdict is FAIL if any
attempt failed, UNDETERMINED if none failed but some attempt is pending,
and PASS otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import UnknownSignal, WidthMismatch
from .sva import ast


@dataclass(frozen=True)
class Trace:
    """Sampled signal values; ``steps[t][name]`` is the value at tick t."""

    signals: Tuple[Tuple[str, int], ...]  # (name, width in bits)
    steps: Tuple[Dict[str, int], ...]

    def __post_init__(self):
        widths = dict(self.signals)
        if len(widths) != len(self.signals):
            raise WidthMismatch("duplicate signal declaration")
        for name, width in self.signals:
            if width < 1:
                raise WidthMismatch(f"zero-width signal {name}")
        if not self.steps:
            raise WidthMismatch("a trace needs at least one step")
        for t, step in enumerate(self.steps):
            for name, width in self.signals:
                if name not in step:
                    raise UnknownSignal(f"{name} missing at tick {t}")
                if not 0 <= step[name] < (1 << width):
                    raise WidthMismatch(
                        f"{name}={step[name]} does not fit {width} bits at tick {t}")

    @property
    def length(self) -> int:
        return len(self.steps)

    def width(self, name: str) -> int:
        for sig, width in self.signals:
            if sig == name:
                return width
        raise UnknownSignal(name)

    def value(self, name: str, t: int) -> int:
        step = self.steps[t]
        if name not in step:
            raise UnknownSignal(name)
        return step[name]

    def to_rows(self) -> List[dict]:
        return [dict(step) for step in self.steps]


def make_trace(signals: Sequence[Tuple[str, int]], steps: Sequence[dict]) -> Trace:
    return Trace(tuple(signals), tuple(dict(s) for s in steps))


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNDETERMINED = "undetermined"


class AttemptStatus(enum.Enum):
    SATISFIED = "satisfied"
    FAILED = "failed"
    PENDING = "pending"
    DISABLED = "disabled"
    VACUOUS = "vacuous"


@dataclass
class AttemptDetail:
    start: int
    status: AttemptStatus


@dataclass
class EvalResult:
    verdict: Verdict
    attempts: List[AttemptDetail] = field(default_factory=list)

    def count(self, status: AttemptStatus) -> int:
        return sum(1 for a in self.attempts if a.status is status)


# --------------------------------------------------------------------------
# Boolean evaluation
# --------------------------------------------------------------------------

_CMP_OPS = {"==", "!=", "<", "<=", ">", ">="}
_LOGIC_OPS = {"&&", "||"}


def _mask(width: int) -> int:
    return (1 << width) - 1


def expr_width(e: ast.BoolExpr, trace: Trace) -> int:
    """Result width; comparisons and logical operators are 1 bit wide,
    other binary operators take the wider operand, shifts keep the left
    operand's width. Each node is self-determined (no context widening)."""
    if isinstance(e, ast.Ident):
        if e.select is not None:
            msb, lsb = e.select
            return msb - lsb + 1
        return trace.width(e.name)
    if isinstance(e, ast.Literal):
        return e.width
    if isinstance(e, ast.Unary):
        return 1 if e.op == "!" else expr_width(e.operand, trace)
    if isinstance(e, ast.Binary):
        if e.op in _CMP_OPS or e.op in _LOGIC_OPS:
            return 1
        if e.op in ("<<", ">>"):
            return expr_width(e.left, trace)
        return max(expr_width(e.left, trace), expr_width(e.right, trace))
    if isinstance(e, (ast.Past, ast.Paren)):
        return expr_width(getattr(e, "operand", None) or e.inner, trace)
    if isinstance(e, (ast.Rose, ast.Fell, ast.Stable)):
        return 1
    raise TypeError(f"not a BoolExpr: {e!r}")


def eval_bool(e: ast.BoolExpr, trace: Trace, t: int) -> int:
    """Two's-complement fixed-width evaluation of ``e`` at tick ``t``.

    ``$past`` before tick 0 yields 0, the standard default sampled value
    for 2-state signals.
    """
    if isinstance(e, ast.Ident):
        v = trace.value(e.name, t)
        if e.select is not None:
            msb, lsb = e.select
            v = (v >> lsb) & _mask(msb - lsb + 1)
        return v
    if isinstance(e, ast.Literal):
        return e.value
    if isinstance(e, ast.Paren):
        return eval_bool(e.inner, trace, t)
    if isinstance(e, ast.Unary):
        v = eval_bool(e.operand, trace, t)
        if e.op == "!":
            return 0 if v else 1
        w = expr_width(e.operand, trace)
        if e.op == "~":
            return ~v & _mask(w)
        return (-v) & _mask(w)  # unary minus: two's complement at operand width
    if isinstance(e, ast.Binary):
        l = eval_bool(e.left, trace, t)
        r = eval_bool(e.right, trace, t)
        op = e.op
        if op == "&&":
            return 1 if (l and r) else 0
        if op == "||":
            return 1 if (l or r) else 0
        if op in _CMP_OPS:
            return {"==": l == r, "!=": l != r, "<": l < r,
                    "<=": l <= r, ">": l > r, ">=": l >= r}[op] and 1 or 0
        if op in ("<<", ">>"):
            w = expr_width(e.left, trace)
            return ((l << r) if op == "<<" else (l >> r)) & _mask(w)
        w = max(expr_width(e.left, trace), expr_width(e.right, trace))
        if op == "+":
            return (l + r) & _mask(w)
        if op == "-":
            return (l - r) & _mask(w)
        return {"&": l & r, "|": l | r, "^": l ^ r}[op] & _mask(w)
    if isinstance(e, ast.Past):
        tp = t - e.depth
        return eval_bool(e.operand, trace, tp) if tp >= 0 else 0
    if isinstance(e, (ast.Rose, ast.Fell, ast.Stable)):
        now = eval_bool(e.operand, trace, t)
        before = eval_bool(e.operand, trace, t - 1) if t >= 1 else 0
        if isinstance(e, ast.Rose):
            return 1 if (now & 1) == 1 and (before & 1) == 0 else 0
        if isinstance(e, ast.Fell):
            return 1 if (now & 1) == 0 and (before & 1) == 1 else 0
        return 1 if now == before else 0
    raise TypeError(f"not a BoolExpr: {e!r}")


# --------------------------------------------------------------------------
# Sequence matching and property status
# --------------------------------------------------------------------------

_TRUE, _FALSE, _PENDING = 1, 0, 2


class _Evaluator:
    """Per-(assertion, trace) evaluator with memoized match sets."""

    def __init__(self, trace: Trace):
        self.trace = trace
        self._bool_memo: Dict[Tuple[int, int], bool] = {}
        self._match_memo: Dict[Tuple[int, int, int], Tuple[Tuple[int, ...], bool]] = {}

    def truthy(self, e: ast.BoolExpr, t: int) -> bool:
        key = (id(e), t)
        v = self._bool_memo.get(key)
        if v is None:
            v = eval_bool(e, self.trace, t) != 0
            self._bool_memo[key] = v
        return v

    def matches(self, s: ast.SequenceExpr, t: int, limit: int):
        """Ends of matches of ``s`` starting at tick ``t`` within
        ``[0, limit)``, plus a pending flag for paths that run past the
        limit."""
        key = (id(s), t, limit)
        cached = self._match_memo.get(key)
        if cached is not None:
            return cached
        ends: set = set()
        pending = False
        if isinstance(s, ast.SeqBool):
            if t >= limit:
                pending = True
            elif self.truthy(s.expr, t):
                ends.add(t)
        elif isinstance(s, ast.Delay):
            if s.left is None:
                starts, pending = {t}, False
            else:
                left_ends, pending = self.matches(s.left, t, limit)
                starts = set(left_ends)
            for m in starts:
                for d in range(s.lo, s.hi + 1):
                    t2 = m + d if s.left is not None else t + d
                    sub_ends, sub_pend = self.matches(s.right, t2, limit)
                    ends.update(sub_ends)
                    pending = pending or sub_pend
        elif isinstance(s, ast.Repeat):
            # s[*n] is s ##1 s ##1 ... (n copies); collect ends per count
            current = {t}
            for count in range(1, s.hi + 1):
                nxt: set = set()
                for start in current:
                    sub_ends, sub_pend = self.matches(s.seq, start, limit)
                    nxt.update(sub_ends)
                    pending = pending or sub_pend
                if count >= s.lo:
                    ends.update(nxt)
                current = {m + 1 for m in nxt}
                if not current:
                    break
        else:
            raise TypeError(f"not a SequenceExpr: {s!r}")
        result = (tuple(sorted(ends)), pending)
        self._match_memo[key] = result
        return result

    def status(self, p: ast.PropertyExpr, t: int, limit: int) -> int:
        if isinstance(p, ast.Seq):
            ends, pend = self.matches(p.seq, t, limit)
            if ends:
                return _TRUE
            return _PENDING if pend else _FALSE
        if isinstance(p, ast.Not):
            st = self.status(p.operand, t, limit)
            if st == _PENDING:
                return _PENDING
            return _FALSE if st == _TRUE else _TRUE
        if isinstance(p, ast.And):
            l = self.status(p.left, t, limit)
            r = self.status(p.right, t, limit)
            if _FALSE in (l, r):
                return _FALSE
            if _PENDING in (l, r):
                return _PENDING
            return _TRUE
        if isinstance(p, ast.Or):
            l = self.status(p.left, t, limit)
            r = self.status(p.right, t, limit)
            if _TRUE in (l, r):
                return _TRUE
            if _PENDING in (l, r):
                return _PENDING
            return _FALSE
        if isinstance(p, ast.Implication):
            ends, _ante_pending = self.matches(p.antecedent, t, limit)
            # antecedent matches that would complete past the trace end
            # impose no obligation within it: unrealized attempts are
            # vacuous rather than pending
            worst = _TRUE
            for m in ends:
                t2 = m if p.overlapped else m + 1
                st = self.status(p.consequent, t2, limit)
                if st == _FALSE:
                    return _FALSE
                if st == _PENDING:
                    worst = _PENDING
            return worst
        raise TypeError(f"not a PropertyExpr: {p!r}")


def eval_assertion(a: ast.Assertion, trace: Trace) -> EvalResult:
    """Evaluate with one attempt per tick.

    An attempt whose disable-iff expression samples nonzero at any tick
    before the attempt resolves is discarded as disabled. Vacuous means
    a top-level implication whose antecedent never matched.
    """
    for name in ast.signals_of(a):
        trace.width(name)  # raises UnknownSignal
    ev = _Evaluator(trace)
    length = trace.length
    attempts: List[AttemptDetail] = []
    for t0 in range(length):
        limit = length
        disabled_at: Optional[int] = None
        if a.disable is not None:
            for t in range(t0, length):
                if ev.truthy(a.disable, t):
                    disabled_at = t
                    break
            if disabled_at is not None:
                limit = disabled_at
        st = ev.status(a.body, t0, limit)
        if st == _FALSE:
            status = AttemptStatus.FAILED
        elif st == _PENDING:
            status = (AttemptStatus.DISABLED if disabled_at is not None
                      else AttemptStatus.PENDING)
        else:
            status = AttemptStatus.SATISFIED
            if isinstance(a.body, ast.Implication):
                ends, _ = ev.matches(a.body.antecedent, t0, limit)
                if not ends:
                    status = AttemptStatus.VACUOUS
        attempts.append(AttemptDetail(t0, status))
    if any(d.status is AttemptStatus.FAILED for d in attempts):
        verdict = Verdict.FAIL
    elif any(d.status is AttemptStatus.PENDING for d in attempts):
        verdict = Verdict.UNDETERMINED
    else:
        verdict = Verdict.PASS
    return EvalResult(verdict, attempts)
