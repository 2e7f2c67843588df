"""Cycle-accurate 2-state simulation of a parsed design.

Each tick: settle combinational assigns in topological order, record the
sampled trace step (pre-edge values), then apply nonblocking updates.
Registers start at 0; during the reset preamble the reset input is
driven to its active level regardless of the stimulus.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

from ..errors import CombinationalCycle, UnknownSignal, WidthMismatch
from ..sva import ast as sva_ast
from ..traces import Trace, make_trace
from . import ast

_CMP_OPS = {"==", "!=", "<", "<=", ">", ">="}


def _mask(width: int) -> int:
    return (1 << width) - 1


def _width(e, widths: Dict[str, int]) -> int:
    if isinstance(e, sva_ast.Ident):
        if e.name not in widths:
            raise UnknownSignal(e.name)
        if e.select is not None:
            msb, lsb = e.select
            return msb - lsb + 1
        return widths[e.name]
    if isinstance(e, sva_ast.Literal):
        return e.width
    if isinstance(e, sva_ast.Paren):
        return _width(e.inner, widths)
    if isinstance(e, sva_ast.Unary):
        return 1 if e.op == "!" else _width(e.operand, widths)
    if isinstance(e, sva_ast.Binary):
        if e.op in _CMP_OPS or e.op in ("&&", "||"):
            return 1
        if e.op in ("<<", ">>"):
            return _width(e.left, widths)
        return max(_width(e.left, widths), _width(e.right, widths))
    raise WidthMismatch(f"expression not allowed in RTL: {e!r}")


def eval_expr(e, env: Dict[str, int], widths: Dict[str, int]) -> int:
    """Combinational evaluation over a value environment (no sampled
    functions; the RTL parser rejects them)."""
    if isinstance(e, sva_ast.Ident):
        if e.name not in env:
            raise UnknownSignal(e.name)
        v = env[e.name]
        if e.select is not None:
            msb, lsb = e.select
            v = (v >> lsb) & _mask(msb - lsb + 1)
        return v
    if isinstance(e, sva_ast.Literal):
        return e.value
    if isinstance(e, sva_ast.Paren):
        return eval_expr(e.inner, env, widths)
    if isinstance(e, sva_ast.Unary):
        v = eval_expr(e.operand, env, widths)
        if e.op == "!":
            return 0 if v else 1
        w = _width(e.operand, widths)
        return (~v if e.op == "~" else -v) & _mask(w)
    if isinstance(e, sva_ast.Binary):
        l = eval_expr(e.left, env, widths)
        r = eval_expr(e.right, env, widths)
        op = e.op
        if op == "&&":
            return 1 if (l and r) else 0
        if op == "||":
            return 1 if (l or r) else 0
        if op in _CMP_OPS:
            return {"==": l == r, "!=": l != r, "<": l < r,
                    "<=": l <= r, ">": l > r, ">=": l >= r}[op] and 1 or 0
        if op in ("<<", ">>"):
            w = _width(e.left, widths)
            return ((l << r) if op == "<<" else (l >> r)) & _mask(w)
        w = max(_width(e.left, widths), _width(e.right, widths))
        if op == "+":
            return (l + r) & _mask(w)
        if op == "-":
            return (l - r) & _mask(w)
        return {"&": l & r, "|": l | r, "^": l ^ r}[op] & _mask(w)
    raise WidthMismatch(f"expression not allowed in RTL: {e!r}")


def assign_order(d: ast.DesignUnit) -> List[int]:
    """Topological order over the continuous assigns (index list)."""
    targets = {t: i for i, (t, _) in enumerate(d.assigns)}
    deps = []
    for _, expr in d.assigns:
        deps.append({targets[s] for s in sva_ast.signals_of_expr(expr)
                     if s in targets})
    order: List[int] = []
    state = [0] * len(d.assigns)  # 0 new, 1 visiting, 2 done
    stack_path: List[int] = []

    def visit(i: int):
        if state[i] == 2:
            return
        if state[i] == 1:
            cycle = stack_path[stack_path.index(i):] + [i]
            raise CombinationalCycle([d.assigns[j][0] for j in cycle])
        state[i] = 1
        stack_path.append(i)
        for j in sorted(deps[i]):
            visit(j)
        stack_path.pop()
        state[i] = 2
        order.append(i)

    for i in range(len(d.assigns)):
        visit(i)
    return order


def _exec(stmt: ast.Stmt, env: Dict[str, int], widths: Dict[str, int],
          updates: Dict[str, int]):
    if isinstance(stmt, ast.NonBlocking):
        w = widths[stmt.target]
        updates[stmt.target] = eval_expr(stmt.expr, env, widths) & _mask(w)
    elif isinstance(stmt, ast.If):
        if eval_expr(stmt.cond, env, widths):
            _exec(stmt.then, env, widths, updates)
        elif stmt.other is not None:
            _exec(stmt.other, env, widths, updates)
    elif isinstance(stmt, ast.Block):
        for s in stmt.stmts:
            _exec(s, env, widths, updates)


def simulate(d: ast.DesignUnit, stimulus: Sequence[Dict[str, int]],
             reset_ticks: int = 0) -> Trace:
    """Run the design over the stimulus, one valuation per tick.

    The stimulus must cover every non-clock input port each tick; the
    clock is implicit in the tick sequence and samples as 1.
    """
    if d.clock is None:
        raise WidthMismatch(f"design {d.name} has no detected clock")
    widths = {n.name: n.width for n in d.nets}
    inputs = [p for p in d.input_ports() if p.name != d.clock]
    order = assign_order(d)
    regs = {t: 0 for t in d.stmt_targets()}
    steps: List[Dict[str, int]] = []
    active_value = None
    if d.reset is not None:
        active_value = 0 if d.reset.active == "low" else 1
    for t, stim in enumerate(stimulus):
        env = dict(regs)
        for p in inputs:
            if p.name not in stim:
                raise UnknownSignal(f"stimulus tick {t} misses input {p.name}")
            v = stim[p.name]
            if not 0 <= v < (1 << p.width):
                raise WidthMismatch(
                    f"stimulus {p.name}={v} does not fit {p.width} bits")
            env[p.name] = v
        if d.reset is not None and t < reset_ticks:
            env[d.reset.signal] = active_value
        env[d.clock] = 1
        for i in order:
            target, expr = d.assigns[i]
            env[target] = eval_expr(expr, env, widths) & _mask(widths[target])
        # wires without drivers sample as 0
        for n in d.nets:
            env.setdefault(n.name, 0)
        steps.append({n.name: env[n.name] for n in d.nets})
        updates: Dict[str, int] = {}
        for proc in d.processes:
            _exec(proc.body, env, widths, updates)
        regs.update(updates)
    return make_trace([(n.name, n.width) for n in d.nets], steps)
