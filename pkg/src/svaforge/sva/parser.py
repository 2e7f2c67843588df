"""Recursive-descent parser for the supported SVA subset.

Precedence, tightest to loosest: boolean operators (Verilog order),
``##`` delay, ``[*..]`` repeat, property ``not``, ``and``, ``or``, and
finally ``|->`` / ``|=>`` (right-associative). Unparenthesized
``a |-> b and c |-> d`` therefore parses as ``a |-> ((b and c) |-> d)``.

Property-level ``and``/``or``/``not`` over plain booleans is folded into
a single boolean sequence leaf when used where a sequence is required
(implication antecedents, delay operands), since a boolean combination
of single-tick sequences matches at exactly the ticks where the folded
boolean holds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..errors import ParseError, UnsupportedConstruct
from . import ast
from .lexer import Token, tokenize

_RESERVED = {
    "assert", "property", "disable", "iff", "posedge", "negedge",
    "and", "or", "not",
}

# Recognizable SVA syntax we deliberately refuse.
_UNSUPPORTED_WORDS = {
    "throughout", "within", "intersect", "until", "s_until", "until_with",
    "s_eventually", "eventually", "always", "s_always", "nexttime",
    "s_nexttime", "first_match", "sequence", "endproperty", "endsequence",
    "if", "else", "case", "accept_on", "reject_on",
}

_SUPPORTED_SYSFUNCS = {"$past", "$rose", "$fell", "$stable"}

_BOOL_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
}


class _Parser:
    RESERVED = _RESERVED

    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            if tok.kind == "ident" and tok.text in _UNSUPPORTED_WORDS:
                raise UnsupportedConstruct(
                    f"unsupported construct {tok.text!r}", tok.pos)
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                             tok.pos, (kind,))
        return self.advance()

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise ParseError(f"expected {word!r}, found {tok.text or 'end of input'!r}",
                             tok.pos, (word,))
        return self.advance()

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    # ---------------------------------------------------------------- item

    def parse_assertion_item(self, max_depth: int) -> ast.Assertion:
        start = self.peek().pos
        label = "anon"
        if self.peek().kind == "ident" and self.peek(1).kind == ":":
            label_tok = self.advance()
            if label_tok.text in self.RESERVED or label_tok.text.startswith("$"):
                raise ParseError(f"invalid label {label_tok.text!r}", label_tok.pos)
            label = label_tok.text
            self.advance()  # ':'
        self.expect_word("assert")
        self.expect_word("property")
        self.expect("(")
        self.expect("@")
        self.expect("(")
        edge_tok = self.peek()
        if edge_tok.kind != "ident" or edge_tok.text not in ("posedge", "negedge"):
            raise ParseError("expected 'posedge' or 'negedge'", edge_tok.pos,
                             ("posedge", "negedge"))
        self.advance()
        sig_tok = self.expect("ident")
        self._check_ident(sig_tok)
        self.expect(")")
        disable = None
        if self.at_word("disable"):
            self.advance()
            self.expect_word("iff")
            self.expect("(")
            disable = self.parse_bool_expr()
            self.expect(")")
        body = self.parse_property()
        self.expect(")")
        if self.peek().kind == ";":
            self.advance()
        end_tok = self.peek()
        if end_tok.kind != "eof":
            raise ParseError(f"trailing input {end_tok.text!r}", end_tok.pos, ("eof",))
        a = ast.Assertion(label=label,
                          clock=ast.ClockEvent(edge_tok.text, sig_tok.text),
                          disable=disable, body=body,
                          source_span=(start, end_tok.pos))
        if ast.tree_depth(a) > max_depth:
            raise ParseError(f"expression tree deeper than {max_depth}", start)
        return a

    # ------------------------------------------------------------ property

    def parse_property(self) -> ast.PropertyExpr:
        left = self.parse_prop_or()
        tok = self.peek()
        if tok.kind in ("|->", "|=>"):
            self.advance()
            ante = self._to_sequence(left, tok.pos)
            cons = self.parse_property()  # right-associative
            return ast.Implication(tok.kind == "|->", ante, cons)
        return left

    def parse_prop_or(self) -> ast.PropertyExpr:
        left = self.parse_prop_and()
        while self.at_word("or"):
            self.advance()
            left = ast.Or(left, self.parse_prop_and())
        return left

    def parse_prop_and(self) -> ast.PropertyExpr:
        left = self.parse_prop_not()
        while self.at_word("and"):
            self.advance()
            left = ast.And(left, self.parse_prop_not())
        return left

    def parse_prop_not(self) -> ast.PropertyExpr:
        if self.at_word("not"):
            self.advance()
            return ast.Not(self.parse_prop_not())
        return self.parse_seq_item()

    # ------------------------------------------------------------ sequence

    def parse_seq_item(self) -> ast.PropertyExpr:
        tok = self.peek()
        if tok.kind == "##":  # leading delay
            self.advance()
            lo, hi = self.parse_delay_range(tok.pos)
            seq: ast.SequenceExpr = ast.Delay(lo, hi, None,
                                              self.parse_repeat_term_seq())
        else:
            first = self.parse_repeat_term()
            if self.peek().kind != "##":
                return first
            seq = self._to_sequence(first, tok.pos)
        while self.peek().kind == "##":
            at = self.advance().pos
            lo, hi = self.parse_delay_range(at)
            seq = ast.Delay(lo, hi, seq, self.parse_repeat_term_seq())
        return ast.Seq(seq)

    def parse_delay_range(self, at: int) -> Tuple[int, int]:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            lo = hi = tok.value
        elif tok.kind == "[":
            self.advance()
            lo = self._range_bound()
            self.expect(":")
            hi = self._range_bound()
            self.expect("]")
        else:
            raise ParseError("expected delay count after '##'", tok.pos,
                             ("number", "["))
        self._check_range(lo, hi, at)
        return lo, hi

    def parse_repeat_term_seq(self) -> ast.SequenceExpr:
        at = self.peek().pos
        return self._to_sequence(self.parse_repeat_term(), at)

    def parse_repeat_term(self) -> ast.PropertyExpr:
        prim = self.parse_primary()
        while self.peek().kind == "[*":
            at = self.advance().pos
            tok = self.peek()
            if tok.kind == "]":
                raise UnsupportedConstruct("unbounded repetition '[*]'", tok.pos)
            lo = self._range_bound()
            hi = lo
            if self.peek().kind == ":":
                self.advance()
                hi = self._range_bound()
            self.expect("]")
            if lo == 0:
                raise UnsupportedConstruct("empty repetition '[*0...]'", at)
            self._check_range(lo, hi, at)
            prim = ast.Seq(ast.Repeat(self._to_sequence(prim, at), lo, hi))
        return prim

    def _range_bound(self) -> int:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "$":
            raise UnsupportedConstruct("unbounded range bound '$'", tok.pos)
        if tok.kind != "number":
            raise ParseError("expected range bound", tok.pos, ("number",))
        self.advance()
        return tok.value

    def _check_range(self, lo: int, hi: int, at: int):
        if lo > hi:
            raise ParseError(f"range low {lo} exceeds high {hi}", at)
        if hi > ast.MAX_DELAY:
            raise ParseError(f"range bound {hi} exceeds maximum {ast.MAX_DELAY}", at)

    def parse_primary(self) -> ast.PropertyExpr:
        tok = self.peek()
        if tok.kind == "ident" and tok.text in _UNSUPPORTED_WORDS:
            raise UnsupportedConstruct(f"unsupported construct {tok.text!r}", tok.pos)
        if tok.kind == "(":
            # A parenthesized unit may be either a boolean expression or a
            # property; try the boolean reading first and fall back.
            mark = self.i
            try:
                b = self.parse_bool_expr()
                return ast.Seq(ast.SeqBool(b))
            except ParseError:
                self.i = mark
            self.advance()  # '('
            p = self.parse_property()
            self.expect(")")
            return p
        b = self.parse_bool_expr()
        return ast.Seq(ast.SeqBool(b))

    def _to_sequence(self, p: ast.PropertyExpr, at: int) -> ast.SequenceExpr:
        """Lower a property to a sequence where the grammar needs one."""
        if isinstance(p, ast.Seq):
            return p.seq
        if isinstance(p, (ast.And, ast.Or)):
            left = self._to_sequence(p.left, at)
            right = self._to_sequence(p.right, at)
            if isinstance(left, ast.SeqBool) and isinstance(right, ast.SeqBool):
                op = "&&" if isinstance(p, ast.And) else "||"
                return ast.SeqBool(ast.Binary(op, left.expr, right.expr))
            raise UnsupportedConstruct(
                "'and'/'or' of temporal sequences is not supported where a "
                "sequence is required", at)
        if isinstance(p, ast.Not):
            inner = self._to_sequence(p.operand, at)
            if isinstance(inner, ast.SeqBool):
                return ast.SeqBool(ast.Unary("!", inner.expr))
            raise UnsupportedConstruct(
                "'not' of a temporal sequence is not supported where a "
                "sequence is required", at)
        raise ParseError("an implication cannot appear where a sequence is "
                         "required", at)

    # ------------------------------------------------------------- boolean

    def parse_bool_expr(self, min_prec: int = 1) -> ast.BoolExpr:
        left = self.parse_bool_unary()
        while True:
            tok = self.peek()
            prec = _BOOL_PREC.get(tok.kind)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            right = self.parse_bool_expr(prec + 1)
            left = ast.Binary(tok.kind, left, right)

    def parse_bool_unary(self) -> ast.BoolExpr:
        tok = self.peek()
        if tok.kind in ("!", "~", "-"):
            self.advance()
            return ast.Unary(tok.kind, self.parse_bool_unary())
        return self.parse_bool_primary()

    def parse_bool_primary(self) -> ast.BoolExpr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return ast.Literal(tok.width, tok.value)
        if tok.kind == "(":
            self.advance()
            inner = self.parse_bool_expr()
            self.expect(")")
            return inner  # redundant grouping is dropped
        if tok.kind == "ident":
            if tok.text.startswith("$"):
                return self._parse_sysfunc()
            if tok.text in _UNSUPPORTED_WORDS:
                raise UnsupportedConstruct(
                    f"unsupported construct {tok.text!r}", tok.pos)
            if tok.text in self.RESERVED:
                raise ParseError(f"expected expression, found {tok.text!r}",
                                 tok.pos, ("expression",))
            self.advance()
            select = None
            if self.peek().kind == "[":
                self.advance()
                msb = self._range_bound()
                lsb = msb
                if self.peek().kind == ":":
                    self.advance()
                    lsb = self._range_bound()
                self.expect("]")
                if msb < lsb:
                    raise ParseError(f"select [{msb}:{lsb}] is reversed", tok.pos)
                select = (msb, lsb)
            return ast.Ident(tok.text, select)
        raise ParseError(f"expected expression, found {tok.text or 'end of input'!r}",
                         tok.pos, ("expression",))

    def _parse_sysfunc(self) -> ast.BoolExpr:
        tok = self.advance()
        name = tok.text
        if name not in _SUPPORTED_SYSFUNCS:
            raise UnsupportedConstruct(f"unsupported system function {name!r}",
                                       tok.pos)
        self.expect("(")
        arg = self.parse_bool_expr()
        if name == "$past":
            depth = 1
            if self.peek().kind == ",":
                self.advance()
                d = self.expect("number")
                depth = d.value
                if depth < 1:
                    raise ParseError("$past depth must be >= 1", d.pos)
            self.expect(")")
            return ast.Past(arg, depth)
        self.expect(")")
        return {"$rose": ast.Rose, "$fell": ast.Fell, "$stable": ast.Stable}[name](arg)

    def _check_ident(self, tok: Token):
        if tok.text in self.RESERVED or tok.text.startswith("$"):
            raise ParseError(f"expected signal name, found {tok.text!r}", tok.pos)


def parse_assertion(text: str, max_depth: int = ast.MAX_TREE_DEPTH) -> ast.Assertion:
    """Parse one assertion item.

    Form: ``label : assert property ( @(edge clk) [disable iff (e)] P ) ;``
    with the label and trailing semicolon optional. Raises ParseError for
    malformed input and UnsupportedConstruct for recognizable SVA syntax
    outside the subset.
    """
    return _Parser(tokenize(text)).parse_assertion_item(max_depth)


def parse_bool(text: str) -> ast.BoolExpr:
    """Parse a standalone boolean expression (used by RTL and width tables)."""
    p = _Parser(tokenize(text))
    e = p.parse_bool_expr()
    p.expect("eof")
    return e


# --------------------------------------------------------------------------
# Candidate extraction from LLM responses
# --------------------------------------------------------------------------

@dataclass
class Candidate:
    """One assertion-shaped substring pulled from a response."""
    text: str
    assertion: Optional[ast.Assertion]
    error: Optional[ParseError]


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)
_ASSERT_RE = re.compile(r"(?:[A-Za-z_][A-Za-z0-9_$]*\s*:\s*)?assert\s+property\b")


def _scan_region(region: str, base: int, out: List[Tuple[int, str]]):
    for m in _ASSERT_RE.finditer(region):
        start = m.start()
        # walk the balanced parens of the property spec
        i = region.find("(", m.end())
        if i < 0:
            out.append((base + start, region[start:].strip()))
            continue
        depth = 0
        end = len(region)
        for j in range(i, len(region)):
            if region[j] == "(":
                depth += 1
            elif region[j] == ")":
                depth -= 1
                if depth == 0:
                    end = j + 1
                    break
        rest = region[end:end + 2]
        if rest.lstrip().startswith(";"):
            end = region.index(";", end) + 1
        out.append((base + start, region[start:end].strip()))


def extract_assertions(text: str) -> List[Candidate]:
    """Pull every assertion-shaped candidate out of an LLM response.

    Fenced code blocks are scanned first, then the remaining prose; order
    of appearance is preserved within each group. Unparseable candidates
    carry their ParseError instead of an AST.
    """
    found: List[Tuple[int, str]] = []
    covered = []
    for m in _FENCE_RE.finditer(text):
        covered.append((m.start(), m.end()))
        _scan_region(m.group(1), m.start(1), found)
    prose_found: List[Tuple[int, str]] = []
    last = 0
    outside = []
    for s, e in covered:
        outside.append((last, s))
        last = e
    outside.append((last, len(text)))
    for s, e in outside:
        _scan_region(text[s:e], s, prose_found)
    results = []
    for _, snippet in found + prose_found:
        try:
            results.append(Candidate(snippet, parse_assertion(snippet), None))
        except ParseError as err:
            results.append(Candidate(snippet, None, err))
    return results
