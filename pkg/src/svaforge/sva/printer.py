"""Canonical text for SVA ASTs.

Both operands of every implication are parenthesized explicitly, so the
printed form of a precedence-trap assertion (an unparenthesized
``a |-> b and c |-> d``) shows the nesting its parse actually has.
Boolean subexpressions get the minimal parentheses the precedence table
requires, so ``parse(print(a))`` reproduces ``a`` node for node.
"""

from __future__ import annotations

from . import ast

_BOOL_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
}
_UNARY_PREC = 10


def _bool_prec(e: ast.BoolExpr) -> int:
    if isinstance(e, ast.Binary):
        return _BOOL_PREC[e.op]
    if isinstance(e, ast.Unary):
        return _UNARY_PREC
    return 11  # atoms, calls, explicit parens


def print_bool(e: ast.BoolExpr) -> str:
    if isinstance(e, ast.Ident):
        if e.select is None:
            return e.name
        msb, lsb = e.select
        sel = f"[{msb}]" if msb == lsb else f"[{msb}:{lsb}]"
        return e.name + sel
    if isinstance(e, ast.Literal):
        if e.width == 32:
            return str(e.value)
        return f"{e.width}'b{e.value:b}" if e.width == 1 else f"{e.width}'d{e.value}"
    if isinstance(e, ast.Unary):
        inner = print_bool(e.operand)
        if _bool_prec(e.operand) < _UNARY_PREC:
            inner = f"({inner})"
        return e.op + inner
    if isinstance(e, ast.Binary):
        prec = _BOOL_PREC[e.op]
        left = print_bool(e.left)
        if _bool_prec(e.left) < prec:
            left = f"({left})"
        right = print_bool(e.right)
        # binary operators associate left; equal precedence on the right
        # needs grouping to survive a reparse
        if _bool_prec(e.right) <= prec:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, ast.Past):
        if e.depth == 1:
            return f"$past({print_bool(e.operand)})"
        return f"$past({print_bool(e.operand)}, {e.depth})"
    if isinstance(e, ast.Rose):
        return f"$rose({print_bool(e.operand)})"
    if isinstance(e, ast.Fell):
        return f"$fell({print_bool(e.operand)})"
    if isinstance(e, ast.Stable):
        return f"$stable({print_bool(e.operand)})"
    if isinstance(e, ast.Paren):
        return f"({print_bool(e.inner)})"
    raise TypeError(f"not a BoolExpr: {e!r}")


def _print_range(lo: int, hi: int) -> str:
    return str(lo) if lo == hi else f"[{lo}:{hi}]"


def print_seq(s: ast.SequenceExpr) -> str:
    if isinstance(s, ast.SeqBool):
        return print_bool(s.expr)
    if isinstance(s, ast.Delay):
        delay = f"##{_print_range(s.lo, s.hi)}"
        right = print_seq(s.right)
        if isinstance(s.right, ast.Delay):
            right = f"({right})"
        if s.left is None:
            return f"{delay} {right}"
        return f"{print_seq(s.left)} {delay} {right}"
    if isinstance(s, ast.Repeat):
        inner = print_seq(s.seq)
        if not isinstance(s.seq, ast.SeqBool):
            inner = f"({inner})"
        rng = str(s.lo) if s.lo == s.hi else f"{s.lo}:{s.hi}"
        return f"{inner} [*{rng}]"
    raise TypeError(f"not a SequenceExpr: {s!r}")


# property precedence levels: implication 0, or 1, and 2, not 3, seq 4
def _prop_level(p: ast.PropertyExpr) -> int:
    if isinstance(p, ast.Implication):
        return 0
    if isinstance(p, ast.Or):
        return 1
    if isinstance(p, ast.And):
        return 2
    if isinstance(p, ast.Not):
        return 3
    return 4


def print_prop(p: ast.PropertyExpr, parent_level: int = 0) -> str:
    if isinstance(p, ast.Implication):
        op = "|->" if p.overlapped else "|=>"
        text = f"({print_seq(p.antecedent)}) {op} ({print_prop(p.consequent, 0)})"
        if parent_level > 0:
            text = f"({text})"
        return text
    if isinstance(p, (ast.Or, ast.And)):
        level = _prop_level(p)
        word = "or" if isinstance(p, ast.Or) else "and"
        left = print_prop(p.left, level)
        right = print_prop(p.right, level + 1)  # left-associative
        text = f"{left} {word} {right}"
        if parent_level > level:
            text = f"({text})"
        return text
    if isinstance(p, ast.Not):
        return f"not {print_prop(p.operand, 3)}"
    if isinstance(p, ast.Seq):
        return print_seq(p.seq)
    raise TypeError(f"not a PropertyExpr: {p!r}")


def print_assertion(a: ast.Assertion) -> str:
    """Canonical single-line text; reparses to a structurally equal AST."""
    parts = [f"{a.label}: assert property (@({a.clock.edge} {a.clock.signal})"]
    if a.disable is not None:
        parts.append(f" disable iff ({print_bool(a.disable)})")
    parts.append(f" {print_prop(a.body)});")
    return "".join(parts)
