"""Tokenizer shared by the SVA and RTL parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from ..errors import ParseError

# Longest-match-first. '|->' and '|=>' must precede '||' and '|'.
_PUNCT = [
    "|->", "|=>", "##", "[*", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "@", "(", ")", "[", "]", ":", ";", ",", "+", "-",
    "!", "~", "&", "|", "^", "<", ">", "=", "?", ".", "*", "/", "%", "{", "}",
]

_IDENT_RE = re.compile(r"\$?[A-Za-z_][A-Za-z0-9_$]*|\$")
_SIZED_RE = re.compile(r"(\d+)'([bdh])([0-9a-fA-F_xzXZ]+)")
_DEC_RE = re.compile(r"\d+")
_WS_RE = re.compile(r"\s+")

_BASES = {"b": 2, "d": 10, "h": 16}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", or the punctuation/keyword itself
    text: str
    pos: int  # byte offset into the (comment-stripped) source
    width: int = 0  # numbers only
    value: int = 0  # numbers only


def strip_comments(text: str) -> str:
    """Blank out // and /* */ comments, preserving byte offsets."""
    out = []
    i, n = 0, len(text)
    while i < n:
        if text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(" " * (j - i))
            i = j
        elif text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise ParseError("unterminated block comment", i)
            j += 2
            out.append(re.sub(r"[^\n]", " ", text[i:j]))
            i = j
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def tokenize(text: str) -> List[Token]:
    """Tokenize comment-stripped source. Raises ParseError on stray bytes."""
    src = strip_comments(text)
    toks: List[Token] = []
    i, n = 0, len(src)
    while i < n:
        m = _WS_RE.match(src, i)
        if m:
            i = m.end()
            continue
        m = _SIZED_RE.match(src, i)
        if m:
            width = int(m.group(1))
            digits = m.group(3).replace("_", "")
            if re.search(r"[xzXZ]", digits):
                raise ParseError("x/z literals are not supported", i)
            value = int(digits, _BASES[m.group(2)])
            if width <= 0:
                raise ParseError("zero-width literal", i)
            if value >= 1 << width:
                raise ParseError(
                    f"literal value {value} does not fit in {width} bits", i)
            toks.append(Token("number", m.group(0), i, width, value))
            i = m.end()
            continue
        m = _DEC_RE.match(src, i)
        if m:
            # bare decimal: 32-bit per the Verilog convention
            toks.append(Token("number", m.group(0), i, 32, int(m.group(0))))
            i = m.end()
            continue
        m = _IDENT_RE.match(src, i)
        if m:
            toks.append(Token("ident", m.group(0), i))
            i = m.end()
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token(p, p, i))
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {src[i]!r}", i)
    toks.append(Token("eof", "", n))
    return toks


def tokenize_loose(text: str) -> List[str]:
    """Best-effort token stream for corpus analytics.

    Unknown bytes become single-character tokens instead of errors, so
    arbitrary (possibly malformed) SVA strings can still be compared.
    """
    try:
        src = strip_comments(text)
    except ParseError:
        src = text
    out: List[str] = []
    i, n = 0, len(src)
    while i < n:
        m = _WS_RE.match(src, i)
        if m:
            i = m.end()
            continue
        m = _SIZED_RE.match(src, i) or _DEC_RE.match(src, i) or _IDENT_RE.match(src, i)
        if m:
            out.append(m.group(0))
            i = m.end()
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                out.append(p)
                i += len(p)
                break
        else:
            out.append(src[i])
            i += 1
    return out
