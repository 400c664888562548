"""Tokenizer shared by the Turtle-subset reader and the query parser."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<comment>\#[^\n]*)
    | (?P<iri><[^<>"{}|^`\\\s]*>)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
    | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?)
    | (?P<directive>@[A-Za-z]+)
    | (?P<name>[A-Za-z][A-Za-z0-9_]*)
    | (?P<punct>[.;,{}*\[\]()])
    | (?P<langtag>\^\^|@)
    """,
    re.VERBOSE,
)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "'": "'"}
_UNESCAPE_RE = re.compile(r"\\(.)")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class LexError(ValueError):
    def __init__(self, line: int, column: int, found: str):
        self.line = line
        self.column = column
        self.found = found
        super().__init__(f"line {line}, column {column}: unexpected character {found!r}")


def tokenize(text: str) -> Iterator[Token]:
    """Yield tokens (comments and whitespace dropped), ending with an ``eof`` token.

    Raises :class:`LexError` on a character no token can start with; callers
    that want to recover can resume with :func:`tokenize` on the remainder.
    """
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            yield Token(kind, value, line, pos - line_start + 1)
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    yield Token("eof", "", line, pos - line_start + 1)


def unescape(body: str) -> str:
    def sub(m: re.Match) -> str:
        ch = m.group(1)
        if ch not in _ESCAPES:
            raise ValueError(f"unsupported escape \\{ch}")
        return _ESCAPES[ch]

    return _UNESCAPE_RE.sub(sub, body)


def escape(value: str) -> str:
    return (
        value.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
