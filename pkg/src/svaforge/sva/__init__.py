"""SVA subset: AST types, parser, printer, and helpers."""

from . import ast
from .ast import Assertion, ClockEvent, signals_of
from .parser import Candidate, extract_assertions, parse_assertion, parse_bool
from .printer import print_assertion, print_bool, print_prop, print_seq

__all__ = [
    "ast", "Assertion", "ClockEvent", "signals_of",
    "Candidate", "extract_assertions", "parse_assertion", "parse_bool",
    "print_assertion", "print_bool", "print_prop", "print_seq",
]
