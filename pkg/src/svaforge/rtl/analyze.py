"""Clock/reset detection and design curation."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional

from ..sva import ast as sva_ast
from . import ast

log = logging.getLogger(__name__)

DEFAULT_RESET_PATTERNS = ["rst", "reset", "rst_n", "resetn"]


class DetectResult(NamedTuple):
    clock: Optional[str]
    reset: Optional[ast.ResetInfo]
    reason: Optional[str]  # why detection came up empty, when it did


def detect_clock_reset(d: ast.DesignUnit,
                       reset_patterns: Optional[List[str]] = None) -> DetectResult:
    """Find the clock driving nonblocking updates and the reset signal.

    The clock is the (unique) clock-edge signal of the edge-triggered
    processes. An async reset is the secondary sensitivity edge; a sync
    reset is a top-level if-condition signal whose name matches one of
    the patterns (case-insensitive substring match).
    """
    patterns = [p.lower() for p in (reset_patterns or DEFAULT_RESET_PATTERNS)]
    if not d.processes:
        return DetectResult(None, None, "no-clocked-process")
    clocks = {proc.clock_edge[1] for proc in d.processes}
    if len(clocks) > 1:
        return DetectResult(None, None,
                            "clock-disagreement: " + ", ".join(sorted(clocks)))
    clock = next(iter(clocks))

    for proc in d.processes:
        if proc.async_reset_edge is not None:
            edge, sig = proc.async_reset_edge
            active = "low" if edge == "negedge" else "high"
            return DetectResult(clock, ast.ResetInfo(sig, active, "async"), None)

    for proc in d.processes:
        candidate = _sync_reset_of(proc.body)
        if candidate is None:
            continue
        sig, active = candidate
        if any(p in sig.lower() for p in patterns):
            return DetectResult(clock, ast.ResetInfo(sig, active, "sync"), None)
    return DetectResult(clock, None, "no-reset")


def _sync_reset_of(stmt: ast.Stmt):
    while isinstance(stmt, ast.Block) and len(stmt.stmts) == 1:
        stmt = stmt.stmts[0]
    if not isinstance(stmt, ast.If):
        return None
    cond = stmt.cond
    negated = False
    while isinstance(cond, (sva_ast.Unary, sva_ast.Paren)):
        if isinstance(cond, sva_ast.Unary):
            if cond.op in ("!", "~"):
                negated = not negated
            cond = cond.operand
        else:
            cond = cond.inner
    if isinstance(cond, sva_ast.Ident) and cond.select is None:
        return cond.name, ("low" if negated else "high")
    return None


@dataclass
class CurationResult:
    kept: List[ast.DesignUnit] = field(default_factory=list)
    rejected: List[tuple] = field(default_factory=list)  # (name, reason)


def curate(designs: List[ast.DesignUnit],
           reset_patterns: Optional[List[str]] = None) -> CurationResult:
    """Keep exactly the designs with both a detected clock and reset."""
    result = CurationResult()
    for d in designs:
        found = detect_clock_reset(d, reset_patterns)
        if found.clock is None:
            reason = found.reason or "no-clock"
        elif found.reset is None:
            reason = found.reason or "no-reset"
        else:
            d.clock = found.clock
            d.reset = found.reset
            result.kept.append(d)
            continue
        log.info("curate: rejecting %s (%s)", d.name, reason)
        result.rejected.append((d.name, reason))
    return result


def load_manifest(path) -> List[ast.DesignUnit]:
    """Read a design-corpus manifest (JSON Lines with name/path/spec);
    relative design paths resolve against the manifest's directory."""
    from .parser import parse_design

    manifest_path = Path(path)
    base = manifest_path.parent
    designs = []
    for lineno, line in enumerate(manifest_path.read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        entry = json.loads(line)
        source_path = Path(entry["path"])
        if not source_path.is_absolute():
            source_path = base / source_path
        designs.append(parse_design(source_path.read_text(),
                                    spec=entry.get("spec"),
                                    name=entry.get("name")))
    return designs
