"""AST node types for the supported SVA subset.

Boolean expressions, sequences, and properties form three layers. All
nodes are frozen dataclasses: structural equality is plain ``==`` and
nodes are hashable, so evaluators may memoize on them freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

MAX_TREE_DEPTH = 64
MAX_DELAY = 16


# --------------------------------------------------------------------------
# Boolean layer
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Ident:
    name: str
    # (msb, lsb) for a part select; msb == lsb for a bit select
    select: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class Literal:
    width: int
    value: int


@dataclass(frozen=True)
class Unary:
    op: str  # ! ~ -
    operand: "BoolExpr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Past:
    operand: "BoolExpr"
    depth: int = 1


@dataclass(frozen=True)
class Rose:
    operand: "BoolExpr"


@dataclass(frozen=True)
class Fell:
    operand: "BoolExpr"


@dataclass(frozen=True)
class Stable:
    operand: "BoolExpr"


@dataclass(frozen=True)
class Paren:
    """Explicit grouping for programmatically built trees.

    The parser never produces this node: redundant source parentheses
    are dropped so that print/parse round-trips compare with ``==``.
    """

    inner: "BoolExpr"


BoolExpr = Union[Ident, Literal, Unary, Binary, Past, Rose, Fell, Stable, Paren]


# --------------------------------------------------------------------------
# Sequence layer
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeqBool:
    expr: BoolExpr


@dataclass(frozen=True)
class Delay:
    """``left ##[lo:hi] right``; a leading delay has ``left`` = None."""

    lo: int
    hi: int
    left: Optional["SequenceExpr"]
    right: "SequenceExpr"


@dataclass(frozen=True)
class Repeat:
    """``seq [*lo:hi]`` consecutive repetition (lo >= 1)."""

    seq: "SequenceExpr"
    lo: int
    hi: int


SequenceExpr = Union[SeqBool, Delay, Repeat]


# --------------------------------------------------------------------------
# Property layer
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Implication:
    overlapped: bool  # True for |->, False for |=>
    antecedent: SequenceExpr
    consequent: "PropertyExpr"


@dataclass(frozen=True)
class And:
    left: "PropertyExpr"
    right: "PropertyExpr"


@dataclass(frozen=True)
class Or:
    left: "PropertyExpr"
    right: "PropertyExpr"


@dataclass(frozen=True)
class Not:
    operand: "PropertyExpr"


@dataclass(frozen=True)
class Seq:
    seq: SequenceExpr


PropertyExpr = Union[Implication, And, Or, Not, Seq]


@dataclass(frozen=True)
class ClockEvent:
    edge: str  # "posedge" | "negedge"
    signal: str


@dataclass(frozen=True)
class Assertion:
    label: str
    clock: ClockEvent
    disable: Optional[BoolExpr]
    body: PropertyExpr
    source_span: Tuple[int, int] = field(default=(0, 0), compare=False)


def tree_depth(node) -> int:
    """Depth of an expression tree (Assertion bodies included)."""
    if isinstance(node, Assertion):
        return 1 + max(tree_depth(node.body),
                       tree_depth(node.disable) if node.disable else 0)
    if isinstance(node, (Ident, Literal)):
        return 1
    if isinstance(node, (Unary, Past, Rose, Fell, Stable, Paren, Not, Seq, SeqBool)):
        child = getattr(node, "operand", None) or getattr(node, "inner", None) \
            or getattr(node, "seq", None) or getattr(node, "expr", None)
        return 1 + tree_depth(child)
    if isinstance(node, (Binary, And, Or)):
        return 1 + max(tree_depth(node.left), tree_depth(node.right))
    if isinstance(node, Delay):
        left = tree_depth(node.left) if node.left is not None else 0
        return 1 + max(left, tree_depth(node.right))
    if isinstance(node, Repeat):
        return 1 + tree_depth(node.seq)
    if isinstance(node, Implication):
        return 1 + max(tree_depth(node.antecedent), tree_depth(node.consequent))
    raise TypeError(f"not an AST node: {node!r}")


def walk_bool(expr: BoolExpr):
    """Yield every BoolExpr node, preorder."""
    yield expr
    if isinstance(expr, (Unary, Past, Rose, Fell, Stable)):
        yield from walk_bool(expr.operand)
    elif isinstance(expr, Paren):
        yield from walk_bool(expr.inner)
    elif isinstance(expr, Binary):
        yield from walk_bool(expr.left)
        yield from walk_bool(expr.right)


def walk_sequences(prop: PropertyExpr):
    """Yield every SequenceExpr reachable from a property, preorder."""
    if isinstance(prop, Seq):
        yield from _walk_seq(prop.seq)
    elif isinstance(prop, Not):
        yield from walk_sequences(prop.operand)
    elif isinstance(prop, (And, Or)):
        yield from walk_sequences(prop.left)
        yield from walk_sequences(prop.right)
    elif isinstance(prop, Implication):
        yield from _walk_seq(prop.antecedent)
        yield from walk_sequences(prop.consequent)


def _walk_seq(seq: SequenceExpr):
    yield seq
    if isinstance(seq, Delay):
        if seq.left is not None:
            yield from _walk_seq(seq.left)
        yield from _walk_seq(seq.right)
    elif isinstance(seq, Repeat):
        yield from _walk_seq(seq.seq)


def bool_leaves(prop: PropertyExpr):
    """Yield the boolean expressions sitting at sequence leaves."""
    for seq in walk_sequences(prop):
        if isinstance(seq, SeqBool):
            yield seq.expr


def signals_of_expr(expr: BoolExpr):
    for node in walk_bool(expr):
        if isinstance(node, Ident):
            yield node.name


def signals_of(a: Assertion):
    """Identifiers referenced by clock, disable, and body, in first
    occurrence order, without duplicates."""
    seen = {}
    def add(name):
        if name not in seen:
            seen[name] = None
    add(a.clock.signal)
    if a.disable is not None:
        for name in signals_of_expr(a.disable):
            add(name)
    for leaf in bool_leaves(a.body):
        for name in signals_of_expr(leaf):
            add(name)
    return list(seen)
