"""Structured form of a parsed RTL module."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from ..sva import ast as sva_ast

BoolExpr = sva_ast.BoolExpr  # RTL expressions reuse the boolean layer


@dataclass(frozen=True)
class NonBlocking:
    target: str
    expr: BoolExpr


@dataclass(frozen=True)
class If:
    cond: BoolExpr
    then: "Stmt"
    other: Optional["Stmt"] = None


@dataclass(frozen=True)
class Block:
    stmts: Tuple["Stmt", ...]


Stmt = Union[NonBlocking, If, Block]


@dataclass(frozen=True)
class SeqProcess:
    """One edge-triggered always block; all assignments nonblocking."""

    clock_edge: Tuple[str, str]  # (edge, signal)
    async_reset_edge: Optional[Tuple[str, str]]
    body: Stmt


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "input" | "output"
    width: int


@dataclass(frozen=True)
class Net:
    name: str
    kind: str  # "wire" | "reg"
    width: int


@dataclass(frozen=True)
class ResetInfo:
    signal: str
    active: str  # "high" | "low"
    kind: str  # "sync" | "async"


@dataclass
class DesignUnit:
    """One flat RTL module plus its optional natural-language spec."""

    name: str
    source: str
    ports: List[Port]
    nets: List[Net]
    assigns: List[Tuple[str, BoolExpr]]
    processes: List[SeqProcess]
    spec: Optional[str] = None
    clock: Optional[str] = None
    reset: Optional[ResetInfo] = None
    _widths: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._widths:
            self._widths = {n.name: n.width for n in self.nets}

    def width(self, name: str) -> int:
        return self._widths[name]

    def has_signal(self, name: str) -> bool:
        return name in self._widths

    def input_ports(self) -> List[Port]:
        return [p for p in self.ports if p.direction == "input"]

    def stmt_targets(self) -> List[str]:
        out = []
        for proc in self.processes:
            _collect_targets(proc.body, out)
        return out


def _collect_targets(stmt: Stmt, out: List[str]):
    if isinstance(stmt, NonBlocking):
        if stmt.target not in out:
            out.append(stmt.target)
    elif isinstance(stmt, If):
        _collect_targets(stmt.then, out)
        if stmt.other is not None:
            _collect_targets(stmt.other, out)
    elif isinstance(stmt, Block):
        for s in stmt.stmts:
            _collect_targets(s, out)
