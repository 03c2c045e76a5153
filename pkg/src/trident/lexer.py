"""Tokenizer for the graph DSL.

Identifiers may not start with an underscore; that prefix is reserved
for compiler-generated temporaries so emitted code can never capture a
user name.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .errors import LexError


class TokKind(Enum):
    IDENT = auto()
    KEYWORD = auto()
    INT = auto()
    FLOAT = auto()
    PUNCT = auto()
    OP = auto()


KEYWORDS = frozenset({
    "function", "forall", "for", "in", "filter", "fixedPoint", "until",
    "iterateInBFS", "iterateInReverse", "from", "if", "else", "return",
    "Min", "Max", "propNode", "propEdge", "Graph", "node", "edge",
    "int", "bool", "long", "float", "double", "True", "False", "INT_MAX",
    "SetN", "SetE", "List",
})

# Longest-match first.
OPERATORS = (
    "&&=", "||=", "&&", "||", "++", "+=", "*=", "==", "!=", "<=", ">=",
    "=", "!", "<", ">", "+", "-", "*", "/", "%",
)

PUNCTUATION = "(){},;:."


@dataclass(frozen=True)
class Token:
    kind: TokKind
    text: str
    line: int  # 1-based
    col: int   # 1-based

    @property
    def end_col(self) -> int:
        return self.col + len(self.text)

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.text!r}, {self.line}:{self.col})"


def _is_ident_start(c: str) -> bool:
    return c.isalpha() and c.isascii()


def _is_ident_char(c: str) -> bool:
    return (c.isalnum() or c == "_") and c.isascii()


def tokenize(source: str) -> list[Token]:
    """Tokenize DSL source text.  ``//`` comments run to end of line."""
    toks: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if _is_ident_start(c):
            start, sl, sc = i, line, col
            while i < n and _is_ident_char(source[i]):
                advance(1)
            text = source[start:i]
            kind = TokKind.KEYWORD if text in KEYWORDS else TokKind.IDENT
            toks.append(Token(kind, text, sl, sc))
            continue
        if c.isdigit():
            start, sl, sc = i, line, col
            while i < n and source[i].isdigit():
                advance(1)
            is_float = False
            if (i + 1 < n and source[i] == "." and source[i + 1].isdigit()):
                is_float = True
                advance(1)
                while i < n and source[i].isdigit():
                    advance(1)
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    is_float = True
                    advance(j - i)
                    while i < n and source[i].isdigit():
                        advance(1)
            text = source[start:i]
            toks.append(Token(TokKind.FLOAT if is_float else TokKind.INT,
                              text, sl, sc))
            continue
        matched = False
        for op in OPERATORS:
            if source.startswith(op, i):
                toks.append(Token(TokKind.OP, op, line, col))
                advance(len(op))
                matched = True
                break
        if matched:
            continue
        if c in PUNCTUATION:
            toks.append(Token(TokKind.PUNCT, c, line, col))
            advance(1)
            continue
        raise LexError(line, col, c)
    return toks
