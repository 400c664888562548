"""A basic-graph-pattern subset of SPARQL over the triple view.

Supported: ``PREFIX`` declarations, ``SELECT [DISTINCT] (?vars | *)``,
``WHERE { ... }`` with triple patterns, ``a``, ``;``, ``,`` and ``#``
comments.  Evaluation is the natural join of the per-pattern matches.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from ._lexer import LexError, Token, tokenize, unescape
from .errors import ParseError, UnknownPrefix
from .rdf import IRI, PREFIXES, TYPE, Literal, Term, Triple, compact, entity_id, normalize_iri, term_key

__all__ = ["BgpQuery", "BindingTable", "PName", "TriplePattern", "Var", "evaluate", "parse_query"]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True)
class PName:
    """A prefixed name, resolved against the query's prefixes at evaluation time."""

    prefix: str
    local: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.prefix}:{self.local}"


PatternTerm = Var | PName | IRI | Literal


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def variables(self) -> list[str]:
        return [t.name for t in self if isinstance(t, Var)]


@dataclass
class BgpQuery:
    prefixes: dict[str, str]
    projection: list[str] | None  # None means SELECT *
    distinct: bool
    patterns: list[TriplePattern]

    def variables(self) -> list[str]:
        """Variables in order of first appearance."""
        seen: dict[str, None] = {}
        for p in self.patterns:
            for v in p.variables():
                seen.setdefault(v)
        return list(seen)

    @property
    def columns(self) -> list[str]:
        return list(self.projection) if self.projection is not None else self.variables()


# -- parsing ----------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        try:
            self.tokens = list(tokenize(text))
        except LexError as exc:
            raise ParseError(exc.line, exc.column, "a valid token", exc.found) from None
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, tok: Token, expected: str) -> ParseError:
        return ParseError(tok.line, tok.column, expected, tok.text or "end of input")

    def is_word(self, tok: Token, word: str) -> bool:
        return tok.kind == "name" and tok.text.upper() == word

    def is_punct(self, tok: Token, ch: str) -> bool:
        return tok.kind == "punct" and tok.text == ch

    def expect_punct(self, ch: str) -> Token:
        tok = self.next()
        if not self.is_punct(tok, ch):
            raise self.error(tok, repr(ch))
        return tok

    def parse(self) -> BgpQuery:
        prefixes: dict[str, str] = {}
        while self.is_word(self.peek(), "PREFIX"):
            self.next()
            name = self.next()
            if name.kind != "pname" or not name.text.endswith(":") or name.text.count(":") != 1:
                raise self.error(name, "a prefix name like 'cco:'")
            iri = self.next()
            if iri.kind != "iri":
                raise self.error(iri, "an IRI in angle brackets")
            prefixes[name.text[:-1]] = iri.text[1:-1]
        tok = self.next()
        if not self.is_word(tok, "SELECT"):
            raise self.error(tok, "PREFIX or SELECT")
        distinct = False
        if self.is_word(self.peek(), "DISTINCT"):
            self.next()
            distinct = True
        projection: list[tuple[str, Token]] | None = []
        if self.is_punct(self.peek(), "*"):
            self.next()
            projection = None
        else:
            while self.peek().kind == "var":
                tok = self.next()
                projection.append((tok.text[1:], tok))
            if not projection:
                raise self.error(self.peek(), "'*' or a variable")
        if self.is_word(self.peek(), "WHERE"):
            self.next()
        self.expect_punct("{")
        patterns = self.triples_block()
        self.expect_punct("}")
        tok = self.next()
        if tok.kind != "eof":
            raise self.error(tok, "end of query")
        query = BgpQuery(prefixes, None, distinct, patterns)
        if projection is not None:
            known = set(query.variables())
            for name, vtok in projection:
                if name not in known:
                    raise self.error(vtok, f"a variable used in the WHERE clause (?{name} is unbound)")
            query.projection = [name for name, _ in projection]
        return query

    def triples_block(self) -> list[TriplePattern]:
        patterns: list[TriplePattern] = []
        while not self.is_punct(self.peek(), "}"):
            subject = self.term(self.next(), "subject")
            self.property_list(subject, patterns)
            tok = self.peek()
            if self.is_punct(tok, "."):
                self.next()
            elif not self.is_punct(tok, "}"):
                raise self.error(tok, "'.' or '}'")
        return patterns

    def property_list(self, subject: PatternTerm, out: list[TriplePattern]) -> None:
        while True:
            verb = self.term(self.next(), "predicate")
            while True:
                obj = self.term(self.next(), "object")
                out.append(TriplePattern(subject, verb, obj))
                if not self.is_punct(self.peek(), ","):
                    break
                self.next()
            if not self.is_punct(self.peek(), ";"):
                return
            while self.is_punct(self.peek(), ";"):
                self.next()
            nxt = self.peek()
            if self.is_punct(nxt, ".") or self.is_punct(nxt, "}"):
                return

    def term(self, tok: Token, role: str) -> PatternTerm:
        if tok.kind == "var":
            return Var(tok.text[1:])
        if tok.kind == "iri":
            return IRI(normalize_iri(tok.text[1:-1]))
        if tok.kind == "pname":
            prefix, local = tok.text.split(":", 1)
            return PName(prefix, local, tok.line, tok.column)
        if role == "predicate" and tok.kind == "name" and tok.text == "a":
            return TYPE
        if role == "object" and tok.kind == "string":
            try:
                return Literal(unescape(tok.text[1:-1]))
            except ValueError:
                raise self.error(tok, "a string with valid escapes") from None
        what = "a variable, IRI or prefixed name"
        if role == "predicate":
            what += " or 'a'"
        if role == "object":
            what += " or string literal"
        raise self.error(tok, f"{what} as {role}")


def parse_query(text: str) -> BgpQuery:
    """Parse query text; raises :class:`~tacio.errors.ParseError` with line and column."""
    return _Parser(text).parse()


# -- evaluation -------------------------------------------------------------------


@dataclass
class BindingTable:
    columns: list[str]
    rows: list[tuple[Term, ...]]

    def __len__(self) -> int:
        return len(self.rows)

    def as_set(self) -> set[tuple[Term, ...]]:
        return set(self.rows)

    def records(self) -> list[dict[str, str]]:
        return [{c: render_term(v) for c, v in zip(self.columns, row)} for row in self.rows]

    def to_json_lines(self) -> str:
        return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in self.records())

    def render(self, width: int = 48) -> str:
        def cut(s: str) -> str:
            return s if len(s) <= width else s[: width - 1] + "…"

        cells = [[cut(v) for v in r.values()] for r in self.records()]
        header = [f"?{c}" for c in self.columns]
        widths = [max([len(h)] + [len(row[i]) for row in cells]) for i, h in enumerate(header)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
        lines.append(f"({len(self.rows)} row{'s' if len(self.rows) != 1 else ''})")
        return "\n".join(lines)


def render_term(t: Term) -> str:
    """Entity IRIs render as their bare id, vocabulary IRIs as prefixed names."""
    if isinstance(t, IRI):
        eid = entity_id(t)
        return eid if eid is not None else compact(t)
    return t.value


def _resolve(q: BgpQuery) -> list[tuple]:
    prefixes = {**PREFIXES, **q.prefixes}
    out = []
    for p in q.patterns:
        terms = []
        for t in p:
            if isinstance(t, PName):
                if t.prefix not in prefixes:
                    raise UnknownPrefix(f"line {t.line}, column {t.column}: undeclared prefix {t.prefix + ':'!r}")
                t = IRI(normalize_iri(prefixes[t.prefix] + t.local))
            terms.append(t)
        out.append(tuple(terms))
    return out


class _TripleIndex:
    def __init__(self, triples: Iterable[Triple]):
        self.all = list(dict.fromkeys(triples))
        self.by_key: dict[tuple, list[Triple]] = defaultdict(list)
        for t in self.all:
            s, p, o = t
            for key in ((0, s), (1, p), (2, o), (0, 1, s, p), (1, 2, p, o), (0, 2, s, o), (0, 1, 2, s, p, o)):
                self.by_key[key].append(t)

    def candidates(self, pattern: tuple, binding: dict[str, Term]) -> list[Triple]:
        fixed = []
        for pos, term in enumerate(pattern):
            if isinstance(term, Var):
                if term.name in binding:
                    fixed.append((pos, binding[term.name]))
            else:
                fixed.append((pos, term))
        if not fixed:
            return self.all
        key = tuple(p for p, _ in fixed) + tuple(v for _, v in fixed)
        return self.by_key.get(key, [])


def _match(pattern: tuple, triple: Triple, binding: dict[str, Term]) -> dict[str, Term] | None:
    new = dict(binding)
    for term, value in zip(pattern, triple):
        if isinstance(term, Var):
            bound = new.get(term.name)
            if bound is None:
                new[term.name] = value
            elif bound != value:
                return None
        elif term != value:
            return None
    return new


def _order(patterns: list[tuple], index: _TripleIndex) -> list[tuple]:
    """Greedy join order: smallest estimated match count first, preferring connected patterns."""
    remaining = list(patterns)
    ordered: list[tuple] = []
    bound: set[str] = set()

    def estimate(p: tuple) -> int:
        return len(index.candidates(p, {}))

    while remaining:
        def rank(p):
            vs = {t.name for t in p if isinstance(t, Var)}
            connected = not ordered or bool(vs & bound) or not vs
            return (not connected, estimate(p))

        best = min(range(len(remaining)), key=lambda i: rank(remaining[i]))
        p = remaining.pop(best)
        ordered.append(p)
        bound |= {t.name for t in p if isinstance(t, Var)}
    return ordered


def _solutions(patterns: list[tuple], index: _TripleIndex) -> Iterator[dict[str, Term]]:
    def step(i: int, binding: dict[str, Term]):
        if i == len(patterns):
            yield binding
            return
        for t in index.candidates(patterns[i], binding):
            nb = _match(patterns[i], t, binding)
            if nb is not None:
                yield from step(i + 1, nb)

    yield from step(0, {})


def _row_key(row: Sequence[Term]):
    return tuple(term_key(t) for t in row)


def evaluate(q: BgpQuery, triples: Iterable[Triple]) -> BindingTable:
    """Natural join of all patterns, projected, DISTINCT applied last, rows sorted."""
    resolved = _resolve(q)
    index = _TripleIndex(triples)
    columns = q.columns
    rows = [tuple(b[c] for c in columns) for b in _solutions(_order(resolved, index), index)]
    if q.distinct:
        rows = list(set(rows))
    rows.sort(key=_row_key)
    return BindingTable(columns, rows)
