"""RTL-lite: parser, static analysis, and simulator for a small
synchronous Verilog subset."""

from . import ast
from .analyze import (DEFAULT_RESET_PATTERNS, CurationResult, DetectResult,
                      curate, detect_clock_reset, load_manifest)
from .ast import DesignUnit, Net, Port, ResetInfo, SeqProcess
from .parser import parse_design
from .sim import simulate

__all__ = [
    "ast", "DesignUnit", "Net", "Port", "ResetInfo", "SeqProcess",
    "parse_design", "simulate", "curate", "detect_clock_reset",
    "load_manifest", "CurationResult", "DetectResult",
    "DEFAULT_RESET_PATTERNS",
]
