"""Parser for a small flat synchronous Verilog subset.

Supported: one module per file, ANSI or non-ANSI port declarations,
wire/reg declarations with ``[msb:0]`` ranges, continuous assigns, and
edge-triggered always blocks containing begin/end, if/else, and
nonblocking assignments. Everything else is rejected explicitly.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from ..errors import MultipleDrivers, ParseError, UnsupportedConstruct
from ..sva import ast as sva_ast
from ..sva.lexer import tokenize
from ..sva.parser import _Parser as _ExprParser
from . import ast

_RTL_RESERVED = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg",
    "assign", "always", "begin", "end", "if", "else", "posedge", "negedge",
    "or", "and", "not", "initial", "generate", "endgenerate", "task",
    "function", "parameter", "localparam", "integer", "case", "endcase",
}

_UNSUPPORTED_ITEMS = {
    "initial": "initial blocks",
    "generate": "generate blocks",
    "task": "tasks",
    "function": "functions",
    "parameter": "parameters",
    "localparam": "parameters",
    "integer": "integer variables",
    "inout": "inout ports",
    "case": "case statements",
}


class _RtlParser(_ExprParser):
    RESERVED = _RTL_RESERVED

    def _parse_sysfunc(self):
        tok = self.peek()
        raise UnsupportedConstruct(
            f"system function {tok.text!r} is not allowed in RTL expressions",
            tok.pos)

    # ------------------------------------------------------------- module

    def parse_module(self) -> Tuple[str, List[ast.Port], List[ast.Net],
                                    List[Tuple[str, ast.BoolExpr]],
                                    List[ast.SeqProcess]]:
        self.expect_word("module")
        name = self._decl_ident()
        ports: List[ast.Port] = []
        port_order: List[str] = []
        nets: dict = {}

        def declare(net_name: str, kind: str, width: int, pos: int):
            if net_name in nets:
                old = nets[net_name]
                if old.width != width and width != 1 and old.width != 1:
                    raise ParseError(f"conflicting widths for {net_name}", pos)
                # a later reg/wire decl refines the kind or width
                nets[net_name] = ast.Net(net_name, kind if kind == "reg" else old.kind,
                                         max(old.width, width))
            else:
                nets[net_name] = ast.Net(net_name, kind, width)

        self.expect("(")
        if self.at_word("input") or self.at_word("output"):
            # ANSI header; direction/kind/width carry over a bare comma
            direction, kind, width = "input", "wire", 1
            while True:
                if self.at_word("input") or self.at_word("output"):
                    direction = self.advance().text
                    kind = "wire"
                    if self.at_word("wire") or self.at_word("reg"):
                        kind = self.advance().text
                    width = self._parse_range()
                pname = self._decl_ident()
                ports.append(ast.Port(pname, direction, width))
                port_order.append(pname)
                declare(pname, "reg" if kind == "reg" else "wire", width,
                        self.peek().pos)
                if self.peek().kind == ",":
                    self.advance()
                    continue
                break
            self.expect(")")
        elif self.peek().kind != ")":
            # non-ANSI: bare name list, directions declared in the body
            while True:
                pname = self._decl_ident()
                port_order.append(pname)
                if self.peek().kind == ",":
                    self.advance()
                    continue
                break
            self.expect(")")
        else:
            self.advance()  # empty port list
        self.expect(";")

        directions: dict = {p.name: p.direction for p in ports}
        widths_from_decl: dict = {p.name: p.width for p in ports}
        assigns: List[Tuple[str, ast.BoolExpr]] = []
        processes: List[ast.SeqProcess] = []

        while not self.at_word("endmodule"):
            tok = self.peek()
            if tok.kind == "eof":
                raise ParseError("missing 'endmodule'", tok.pos, ("endmodule",))
            if tok.kind != "ident":
                raise ParseError(f"unexpected {tok.text!r}", tok.pos)
            word = tok.text
            if word in _UNSUPPORTED_ITEMS:
                raise UnsupportedConstruct(
                    f"{_UNSUPPORTED_ITEMS[word]} are not supported", tok.pos)
            if word in ("input", "output"):
                self.advance()
                kind = "wire"
                if self.at_word("wire") or self.at_word("reg"):
                    kind = self.advance().text
                width = self._parse_range()
                for dname in self._decl_ident_list():
                    directions[dname] = word
                    widths_from_decl[dname] = width
                    declare(dname, kind, width, tok.pos)
                self.expect(";")
            elif word in ("wire", "reg"):
                self.advance()
                width = self._parse_range()
                for dname in self._decl_ident_list():
                    declare(dname, word, width, tok.pos)
                self.expect(";")
            elif word == "assign":
                self.advance()
                target = self._decl_ident()
                self.expect("=")
                expr = self.parse_bool_expr()
                self.expect(";")
                assigns.append((target, expr))
            elif word == "always":
                processes.append(self._parse_always())
            else:
                # an identifier here is most likely a module instantiation
                raise UnsupportedConstruct(
                    f"module item starting with {word!r} (instances are not "
                    "supported)", tok.pos)
        self.advance()  # endmodule
        extra = self.peek()
        if extra.kind != "eof":
            raise ParseError(
                f"extra input after 'endmodule' (one module per file): "
                f"{extra.text!r}", extra.pos)

        # finalize the port list in header order
        final_ports = []
        for pname in port_order:
            if pname not in directions:
                raise ParseError(f"port {pname} has no direction declaration", 0)
            width = widths_from_decl.get(pname, 1)
            final_ports.append(ast.Port(pname, directions[pname], width))
            if pname not in nets:
                nets[pname] = ast.Net(pname, "wire", width)
        net_list = list(nets.values())
        return name, final_ports, net_list, assigns, processes

    def _decl_ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in self.RESERVED \
                or tok.text.startswith("$"):
            raise ParseError(f"expected identifier, found {tok.text!r}", tok.pos,
                             ("ident",))
        self.advance()
        return tok.text

    def _decl_ident_list(self) -> List[str]:
        names = [self._decl_ident()]
        while self.peek().kind == ",":
            self.advance()
            names.append(self._decl_ident())
        return names

    def _parse_range(self) -> int:
        if self.peek().kind != "[":
            return 1
        at = self.advance().pos
        msb = self._range_bound()
        self.expect(":")
        lsb = self._range_bound()
        self.expect("]")
        if lsb != 0:
            raise UnsupportedConstruct("ranges must be [msb:0]", at)
        return msb + 1

    # ------------------------------------------------------------ processes

    def _parse_always(self) -> ast.SeqProcess:
        at = self.expect_word("always").pos
        self.expect("@")
        self.expect("(")
        edges = [self._parse_edge()]
        while self.at_word("or"):
            self.advance()
            edges.append(self._parse_edge())
        self.expect(")")
        if len(edges) > 2:
            raise UnsupportedConstruct(
                "sensitivity lists with more than two edges", at)
        body = self._parse_stmt()
        if len(edges) == 1:
            return ast.SeqProcess(edges[0], None, body)
        # two edges: the one tested by the outermost if is the async reset
        cond_sigs = _outer_if_signals(body)
        reset_edges = [e for e in edges if e[1] in cond_sigs]
        if len(reset_edges) != 1:
            raise ParseError(
                "cannot tell clock from async reset: exactly one sensitivity "
                "edge must be tested by the outermost if", at)
        reset = reset_edges[0]
        clock = edges[0] if edges[1] == reset else edges[1]
        return ast.SeqProcess(clock, reset, body)

    def _parse_edge(self) -> Tuple[str, str]:
        tok = self.peek()
        if tok.kind != "ident" or tok.text not in ("posedge", "negedge"):
            raise UnsupportedConstruct(
                "only edge-triggered sensitivity lists are supported", tok.pos)
        self.advance()
        return (tok.text, self._decl_ident())

    def _parse_stmt(self) -> ast.Stmt:
        tok = self.peek()
        if self.at_word("begin"):
            self.advance()
            stmts = []
            while not self.at_word("end"):
                if self.peek().kind == "eof":
                    raise ParseError("missing 'end'", self.peek().pos, ("end",))
                stmts.append(self._parse_stmt())
            self.advance()
            return ast.Block(tuple(stmts))
        if self.at_word("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_bool_expr()
            self.expect(")")
            then = self._parse_stmt()
            other = None
            if self.at_word("else"):
                self.advance()
                other = self._parse_stmt()
            return ast.If(cond, then, other)
        target = self._decl_ident()
        op = self.peek()
        if op.kind == "=":
            raise UnsupportedConstruct(
                "blocking assignment inside an edge-triggered process", op.pos)
        if op.kind == "[":
            raise UnsupportedConstruct("indexed assignment targets", op.pos)
        self.expect("<=")
        expr = self.parse_bool_expr()
        self.expect(";")
        return ast.NonBlocking(target, expr)


def _outer_if_signals(stmt: ast.Stmt) -> List[str]:
    """Signals tested (possibly negated) by the outermost if of a body."""
    while isinstance(stmt, ast.Block) and len(stmt.stmts) == 1:
        stmt = stmt.stmts[0]
    if not isinstance(stmt, ast.If):
        return []
    cond = stmt.cond
    while isinstance(cond, (sva_ast.Unary, sva_ast.Paren)):
        cond = getattr(cond, "operand", None) or cond.inner
    if isinstance(cond, sva_ast.Ident):
        return [cond.name]
    return []


def parse_design(text: str, spec: Optional[str] = None, name: Optional[str] = None,
                 reset_patterns: Optional[List[str]] = None) -> ast.DesignUnit:
    """Parse one module and run clock/reset detection on it.

    Raises ParseError for malformed input, UnsupportedConstruct for
    out-of-subset items, and MultipleDrivers when a signal has more than
    one driver.
    """
    parser = _RtlParser(tokenize(text))
    mod_name, ports, nets, assigns, processes = parser.parse_module()
    design = ast.DesignUnit(name=name or mod_name, source=text, ports=ports,
                            nets=nets, assigns=assigns, processes=processes,
                            spec=spec)
    _check_drivers(design)
    from .analyze import detect_clock_reset  # cycle-free: analyze imports ast only
    found = detect_clock_reset(design, reset_patterns)
    design.clock = found.clock
    design.reset = found.reset
    return design


def _check_drivers(d: ast.DesignUnit):
    widths = {n.name: n.width for n in d.nets}
    driven: dict = {}
    for target, expr in d.assigns:
        if target not in widths:
            raise ParseError(f"assign target {target} is not declared", 0)
        if driven.get(target):
            raise MultipleDrivers(target)
        driven[target] = "assign"
        for sig in sva_ast.signals_of_expr(expr):
            if sig not in widths:
                raise ParseError(f"signal {sig} is not declared", 0)
    kinds = {n.name: n.kind for n in d.nets}
    for proc in d.processes:
        targets = []
        ast._collect_targets(proc.body, targets)
        for target in targets:
            if target not in widths:
                raise ParseError(f"register {target} is not declared", 0)
            if kinds[target] != "reg":
                raise ParseError(f"process target {target} must be a reg", 0)
            if driven.get(target):
                raise MultipleDrivers(target)
        for target in targets:
            driven[target] = "process"
        for expr in _process_exprs(proc.body):
            for sig in sva_ast.signals_of_expr(expr):
                if sig not in widths:
                    raise ParseError(f"signal {sig} is not declared", 0)


def _process_exprs(stmt: ast.Stmt):
    if isinstance(stmt, ast.NonBlocking):
        yield stmt.expr
    elif isinstance(stmt, ast.If):
        yield stmt.cond
        yield from _process_exprs(stmt.then)
        if stmt.other is not None:
            yield from _process_exprs(stmt.other)
    elif isinstance(stmt, ast.Block):
        for s in stmt.stmts:
            yield from _process_exprs(s)
