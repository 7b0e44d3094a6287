"""Tokenizer for the supported Java subset.

Whitespace and comments are never tokens; they survive as the bytes between
consecutive token spans, which is what makes lossless re-rendering possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while
    """.split()
)
LITERAL_WORDS = frozenset({"true", "false", "null"})

# '>' is always a single token so that nested type arguments like
# List<List<String>> close cleanly; the expression parser glues adjacent '>'
# tokens back into shift operators.
OPERATORS = sorted(
    """
    <<= >= <= == != && || ++ -- += -= *= /= &= |= ^= %= << -> ::
    = > < ! ~ ? : + - * / & | ^ %
    """.split(),
    key=len,
    reverse=True,
)
PUNCTUATION = ("...", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@")

_SPACE = re.compile(r"(?:\s+|//[^\n]*|/\*.*?\*/)+", re.S)
_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_HOLE = re.compile(r"\$(\d+)\$")
_NUMBER = re.compile(
    r"(?:0[xX][0-9a-fA-F_]+|0[bB][01_]+)[lL]?"
    r"|(?:\d[\d_]*(?:\.[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlL]?"
)


class LexError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str  # identifier | keyword | literal | operator | punctuation | hole
    text: str
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def _scan_quoted(source: str, pos: int, quote: str) -> int:
    if quote == '"' and source.startswith('"""', pos):
        close = source.find('"""', pos + 3)
        while close != -1 and source[close - 1] == "\\":
            close = source.find('"""', close + 1)
        if close == -1:
            raise LexError("unterminated text block", pos)
        return close + 3
    i = pos + 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == "\n":
            break
        i += 1
    what = "string" if quote == '"' else "char"
    raise LexError(f"unterminated {what} literal", pos)


def tokenize(source: str, *, template: bool = False) -> list[Token]:
    """Split ``source`` into tokens.

    With ``template=True`` the atom ``$n$`` is lexed as a ``hole`` token and
    any other identifier starting with ``$`` is rejected.
    """
    tokens: list[Token] = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _SPACE.match(source, pos)
        if m:
            pos = m.end()
            continue
        if source.startswith("/*", pos):
            raise LexError("unterminated comment", pos)
        c = source[pos]
        if template and c == "$":
            m = _HOLE.match(source, pos)
            if not m:
                raise LexError("malformed template hole", pos)
            tokens.append(Token("hole", m.group(0), pos, m.end()))
            pos = m.end()
            continue
        if c.isalpha() or c in "_$":
            m = _IDENT.match(source, pos)
            word = m.group(0)
            if word in KEYWORDS:
                kind = "keyword"
            elif word in LITERAL_WORDS:
                kind = "literal"
            else:
                kind = "identifier"
            tokens.append(Token(kind, word, pos, m.end()))
            pos = m.end()
            continue
        if c.isdigit() or (c == "." and pos + 1 < n and source[pos + 1].isdigit()):
            m = _NUMBER.match(source, pos)
            tokens.append(Token("literal", m.group(0), pos, m.end()))
            pos = m.end()
            continue
        if c in "\"'":
            end = _scan_quoted(source, pos, c)
            tokens.append(Token("literal", source[pos:end], pos, end))
            pos = end
            continue
        for p in PUNCTUATION:
            if source.startswith(p, pos):
                tokens.append(Token("punctuation", p, pos, pos + len(p)))
                pos += len(p)
                break
        else:
            for op in OPERATORS:
                if source.startswith(op, pos):
                    tokens.append(Token("operator", op, pos, pos + len(op)))
                    pos += len(op)
                    break
            else:
                raise LexError(f"illegal character {c!r}", pos)
    return tokens


def render(source: str, tokens: list[Token]) -> str:
    """Rebuild the source from tokens plus the gaps between them."""
    out = []
    prev = 0
    for tok in tokens:
        out.append(source[prev : tok.start])
        out.append(tok.text)
        prev = tok.end
    out.append(source[prev:])
    return "".join(out)


def line_col(source: str, offset: int) -> tuple[int, int]:
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col


def offset_of(source: str, line: int, col: int) -> int:
    start = 0
    for _ in range(line - 1):
        nxt = source.find("\n", start)
        if nxt == -1:
            raise ValueError(f"line {line} out of range")
        start = nxt + 1
    return start + col - 1
