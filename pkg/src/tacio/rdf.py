"""Triple view of a graph, with a deterministic Turtle-subset writer and reader.

Entity ids become IRIs under ``urn:tacio:`` (percent-encoded), vocabulary terms
come from the rdf:, cco:, obo: and tacio: namespaces.  Besides the asserted
records the view carries derived triples: copy-act classes, the transitive
reduction of ``has_information_descendant_copy``, aggregates, and canonicity.
:func:`from_triples` ignores the derived part when rebuilding a graph.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, NamedTuple
from urllib.parse import quote, unquote

from . import canonicity, lineage
from ._lexer import LexError, Token, escape, tokenize, unescape
from .errors import Code, Diagnostic, InvalidGraph, TacioError
from .model import (
    ActKind,
    Agent,
    Carrier,
    ContentItem,
    Defeater,
    DefeaterKind,
    EncodingAct,
    Graph,
    Icse,
    validate,
)

__all__ = [
    "IRI",
    "Literal",
    "PREFIXES",
    "Triple",
    "entity_iri",
    "export_turtle",
    "from_triples",
    "import_turtle",
    "to_triples",
]

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
CCO_NS = "http://www.ontologyrepository.com/CommonCoreOntologies/"
OBO_NS = "http://purl.obolibrary.org/obo/"
TACIO_NS = "http://www.ontologyrepository.com/CommonCoreOntologies/Exp/NewInformationOntology"
DATA_NS = "urn:tacio:"
AGGREGATE_NS = "urn:tacio-aggregate:"

PREFIXES: dict[str, str] = {"rdf": RDF_NS, "cco": CCO_NS, "obo": OBO_NS, "tacio": TACIO_NS}


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def __str__(self) -> str:
        return compact(self)


@dataclass(frozen=True, order=True)
class Literal:
    value: str

    def __str__(self) -> str:
        return f'"{escape(self.value)}"'


Term = IRI | Literal


def term_key(t: Term) -> tuple[int, str]:
    return (0 if isinstance(t, IRI) else 1, t.value)


class Triple(NamedTuple):
    subject: IRI
    predicate: IRI
    object: Term

    def key(self):
        return (term_key(self.subject), term_key(self.predicate), term_key(self.object))


def _ns(base: str):
    return lambda local: IRI(base + local)


rdf, cco, obo, tacio = _ns(RDF_NS), _ns(CCO_NS), _ns(OBO_NS), _ns(TACIO_NS)

TYPE = rdf("type")
IS_CARRIER_OF = obo("RO_0010002")
HAS_PART = obo("BFO_0000051")
DESCRIBES = cco("describes")
HAS_INPUT = cco("has_input")
INPUT_OF = cco("input_of")
HAS_OUTPUT = cco("has_output")
AGENT_IN = cco("agent_in")
HAS_PROCESS_PART = cco("has_process_part")
PRESCRIBED_BY = cco("prescribed_by")
PPF = cco("ProcessOfProperFunctioning")
INTENTIONAL_ACT = cco("IntentionalAct")
AGENT = cco("Agent")
ICE = cco("InformationContentEntity")

INFORMATION_BEARER = tacio("InformationBearer")
ICSE = tacio("InformationCarrierStructureEntity")
DEFEATER = tacio("Defeater")
HAS_DIGEST = tacio("has_digest")
HAS_CONCRETIZER_TYPE = tacio("has_concretizer_type")
EXPECTED_CARRIER_TYPE = tacio("expected_carrier_type")
EXPECTED_CONCRETIZER_TYPE = tacio("expected_concretizer_type")
HAS_PAYLOAD = tacio("has_payload")
HAS_REFERENCE_CARRIER = tacio("has_reference_carrier")
PROCESS_PART_INDEX = tacio("process_part_index")
OCCURS_AT = tacio("occurs_at")
HAS_DEFEATER = tacio("hasDefeater")
DEFEATER_KIND = tacio("defeater_kind")
STATEMENT = tacio("statement")
DESCENDANT_COPY = tacio("has_information_descendant_copy")
IS_CANONICAL_COPY_OF = tacio("is_canonical_copy_of")
HAS_CANONICAL_COPY = tacio("has_canonical_copy")
IS_CANONICAL_MEMBER_OF = tacio("is_canonical_member_of")
HAS_CANONICAL_MEMBER = tacio("has_canonical_member")
HAS_MEMBER = tacio("has_member")
HAS_EARLIEST_ANCESTOR = tacio("has_earliest_ancestor")
AGGREGATE_OF_COPIES = tacio("AggregateOfInformationCarrierCopies")

ACT_KIND_TYPES = {
    ActKind.ENCODING: tacio("ActOfEncoding"),
    ActKind.COPYING: tacio("ActOfCopying"),
    ActKind.ENCODING_ICSE: tacio("ActOfEncodingAnInformationCarrierStructureEntity"),
    ActKind.PROCESS: INTENTIONAL_ACT,
}
COPY_CLASS_TYPES = {
    lineage.CopyClass.DUPLICATION: tacio("ActOfDuplication"),
    lineage.CopyClass.CARRIER_TRANSITION: tacio("ActOfInformationCarrierTransition"),
    lineage.CopyClass.CONCRETIZER_TRANSITION: tacio("ActOfConcretizerTransition"),
    lineage.CopyClass.CARRIER_AND_CONCRETIZER_TRANSITION: tacio("ActOfCarrierAndConcretizerTransition"),
}
AGGREGATE_CLASS_TYPES = {
    lineage.AggregateClass.DUPLICATES: tacio("AggregateOfDuplicateInformationCarriers"),
    lineage.AggregateClass.PSEUDO_DUPLICATES: tacio("AggregateOfPseudoDuplicateInformationCarriers"),
}
# Spellings accepted on input and rewritten to the emitted IRI.
ALIASES = {
    TACIO_NS + "ActofCarrierandConcretizerTransition": TACIO_NS + "ActOfCarrierAndConcretizerTransition",
}

_LOCAL_RE = re.compile(r"^(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?$")


def normalize_iri(value: str) -> str:
    return ALIASES.get(value, value)


def entity_iri(entity_id: str) -> IRI:
    return IRI(DATA_NS + quote(entity_id, safe="-._~!$&'()*+,;=@/"))


def entity_id(iri: IRI) -> str | None:
    if isinstance(iri, IRI) and iri.value.startswith(DATA_NS):
        return unquote(iri.value[len(DATA_NS):])
    return None


def aggregate_iri(root: str) -> IRI:
    return IRI(AGGREGATE_NS + quote(root, safe="-._~!$&'()*+,;=@/"))


# -- graph -> triples ---------------------------------------------------------


def _transitive_reduction(edges: set[tuple[str, str]]) -> set[tuple[str, str]]:
    children = defaultdict(set)
    for u, v in edges:
        if u != v:
            children[u].add(v)
    reach: dict[str, set[str]] = {}

    def reachable(u: str) -> set[str]:
        if u not in reach:
            seen, stack = set(), list(children.get(u, ()))
            while stack:
                n = stack.pop()
                if n not in seen:
                    seen.add(n)
                    stack.extend(children.get(n, ()))
            reach[u] = seen
        return reach[u]

    return {
        (u, v)
        for u in children
        for v in children[u]
        if not any(v in reachable(w) for w in children[u] if w != v)
    }


def to_triples(g: Graph, chain_rule: bool = True) -> list[Triple]:
    """Sorted triple view of a well-formed graph.

    Raises :class:`InvalidGraph` if :func:`~tacio.model.validate` reports anything.
    """
    diags = validate(g)
    if diags:
        raise InvalidGraph(diags)
    out: set[Triple] = set()

    def add(s: IRI, p: IRI, o: Term) -> None:
        out.add(Triple(s, p, o))

    for a in g.agents.values():
        s = entity_iri(a.id)
        add(s, TYPE, AGENT)
        if a.agent_type:
            add(s, TYPE, cco(a.agent_type))
        for part in a.parts:
            add(s, HAS_PART, entity_iri(part))
    for c in g.contents.values():
        s = entity_iri(c.id)
        add(s, TYPE, ICE)
        if c.digest:
            add(s, HAS_DIGEST, Literal(c.digest))
        for topic in c.about:
            add(s, DESCRIBES, entity_iri(topic))
    for c in g.carriers.values():
        s = entity_iri(c.id)
        add(s, TYPE, INFORMATION_BEARER)
        add(s, TYPE, cco(c.carrier_type))
        add(s, HAS_CONCRETIZER_TYPE, Literal(c.concretizer_type))
        for content in c.carries:
            add(s, IS_CARRIER_OF, entity_iri(content))
        for part in c.parts:
            add(s, HAS_PART, entity_iri(part))
    for i in g.icses.values():
        s = entity_iri(i.id)
        add(s, TYPE, ICSE)
        add(s, EXPECTED_CARRIER_TYPE, Literal(i.expected_carrier_type))
        add(s, EXPECTED_CONCRETIZER_TYPE, Literal(i.expected_concretizer_type))
        if i.payload:
            add(s, HAS_PAYLOAD, Literal(i.payload))
    for act in g.acts.values():
        s = entity_iri(act.id)
        add(s, TYPE, ACT_KIND_TYPES[act.act_kind])
        if act.act_type:
            add(s, TYPE, cco(act.act_type))
        if act.ppf:
            add(s, TYPE, PPF)
        if act.is_copy:
            add(s, TYPE, COPY_CLASS_TYPES[lineage.classify_copy_act(g, act.id)])
            add(s, HAS_REFERENCE_CARRIER, entity_iri(act.reference))
        for inp in act.inputs | ({act.reference} if act.reference else set()):
            add(s, HAS_INPUT, entity_iri(inp))
            add(entity_iri(inp), INPUT_OF, s)
        if act.output is not None:
            add(s, HAS_OUTPUT, entity_iri(act.output))
        add(entity_iri(act.agent), AGENT_IN, s)
        for n, sub in enumerate(act.sub_acts):
            add(s, HAS_PROCESS_PART, entity_iri(sub))
            add(entity_iri(sub), PROCESS_PART_INDEX, Literal(str(n)))
        if act.prescribed_by:
            add(s, PRESCRIBED_BY, entity_iri(act.prescribed_by))
        if act.at:
            add(s, OCCURS_AT, Literal(act.at))
    for d in g.defeaters.values():
        s = entity_iri(d.id)
        add(s, TYPE, DEFEATER)
        add(entity_iri(d.target), HAS_DEFEATER, s)
        add(s, DEFEATER_KIND, Literal(d.kind.value))
        if d.statement:
            add(s, STATEMENT, Literal(d.statement))

    for u, v in _transitive_reduction(lineage.descendant_edges(g)):
        add(entity_iri(u), DESCENDANT_COPY, entity_iri(v))
    for u, v in lineage.descendant_edges(g):
        if canonicity.is_canonical_copy(g, v, u).holds:
            add(entity_iri(v), IS_CANONICAL_COPY_OF, entity_iri(u))
            add(entity_iri(u), HAS_CANONICAL_COPY, entity_iri(v))
    for agg in lineage.all_aggregates(g):
        if len(agg.members) < 2:
            continue
        s = aggregate_iri(agg.root)
        add(s, TYPE, AGGREGATE_OF_COPIES)
        add(s, TYPE, AGGREGATE_CLASS_TYPES[agg.classification])
        add(s, HAS_EARLIEST_ANCESTOR, entity_iri(agg.root))
        for m in agg.members:
            add(s, HAS_MEMBER, entity_iri(m))
        for m in canonicity.canonical_members(g, agg.root, chain_rule):
            add(s, HAS_CANONICAL_MEMBER, entity_iri(m))
            add(entity_iri(m), IS_CANONICAL_MEMBER_OF, s)
    return sorted(out, key=Triple.key)


# -- Turtle writer --------------------------------------------------------------

_PREFIX_ORDER = ("rdf", "cco", "obo", "tacio")


def _valid_local(local: str) -> bool:
    return _LOCAL_RE.match(local) is not None


def compact(iri: IRI, prefixes: dict[str, str] = PREFIXES) -> str:
    best = None
    for prefix, base in prefixes.items():
        if iri.value.startswith(base) and (best is None or len(base) > len(prefixes[best])):
            best = prefix
    if best is not None:
        local = iri.value[len(prefixes[best]):]
        if _valid_local(local):
            return f"{best}:{local}"
    return f"<{iri.value}>"


def _render(t: Term) -> str:
    return compact(t) if isinstance(t, IRI) else str(t)


def export_turtle(g: Graph, chain_rule: bool = True) -> str:
    triples = to_triples(g, chain_rule)
    return write_turtle(triples)


def write_turtle(triples: Iterable[Triple]) -> str:
    lines = [f"@prefix {p}: <{PREFIXES[p]}> ." for p in _PREFIX_ORDER]
    ordered = sorted(triples, key=Triple.key)
    i = 0
    while i < len(ordered):
        subject = ordered[i].subject
        block = []
        while i < len(ordered) and ordered[i].subject == subject:
            predicate = ordered[i].predicate
            objects = []
            while i < len(ordered) and ordered[i].subject == subject and ordered[i].predicate == predicate:
                objects.append(_render(ordered[i].object))
                i += 1
            verb = "a" if predicate == TYPE else _render(predicate)
            block.append(f"{verb} {', '.join(objects)}")
        lines.append("")
        lines.append(f"{_render(subject)} " + " ;\n    ".join(block) + " .")
    return "\n".join(lines) + "\n"


# -- Turtle reader --------------------------------------------------------------


class _Skip(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


class _TurtleReader:
    def __init__(self, text: str):
        self.text = text
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []
        self.diags: list[Diagnostic] = []
        self.tokens: list[Token] = []
        self._lex()
        self.pos = 0

    def _lex(self) -> None:
        # On a lexing error, record it, blank the rest of the offending line, and carry on.
        lines = self.text.split("\n")
        while True:
            try:
                self.tokens = list(tokenize("\n".join(lines)))
                return
            except LexError as exc:
                self.diags.append(Diagnostic(
                    exc.line, Code.SYNTAX, f"column {exc.column}: unexpected character {exc.found!r}",
                ))
                bad = lines[exc.line - 1]
                lines[exc.line - 1] = bad[: exc.column - 1] + " " * (len(bad) - exc.column + 1)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, tok: Token, expected: str, code: Code = Code.SYNTAX):
        found = tok.text or "end of input"
        raise _Skip(Diagnostic(tok.line, code, f"column {tok.column}: expected {expected}, found {found!r}"))

    def recover(self) -> None:
        last = self.tokens[self.pos - 1] if self.pos else None
        if last is not None and last.kind == "punct" and last.text == ".":
            return
        while True:
            tok = self.next()
            if tok.kind == "eof" or (tok.kind == "punct" and tok.text == "."):
                return

    def run(self) -> tuple[list[Triple], list[Diagnostic]]:
        while self.peek().kind != "eof":
            try:
                self.statement()
            except _Skip as exc:
                self.diags.append(exc.diagnostic)
                self.recover()
        return self.triples, self.diags

    def expect_punct(self, ch: str) -> None:
        tok = self.next()
        if not (tok.kind == "punct" and tok.text == ch):
            self.fail(tok, repr(ch))

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind == "directive" and tok.text == "@prefix":
            self.next()
            self.prefix_decl()
            self.expect_punct(".")
        elif tok.kind == "name" and tok.text.upper() == "PREFIX":
            self.next()
            self.prefix_decl()
        else:
            self.triples_statement()

    def prefix_decl(self) -> None:
        name = self.next()
        if name.kind != "pname" or not name.text.endswith(":") or name.text.count(":") != 1:
            self.fail(name, "a prefix name like 'cco:'")
        iri = self.next()
        if iri.kind != "iri":
            self.fail(iri, "an IRI in angle brackets")
        self.prefixes[name.text[:-1]] = iri.text[1:-1]

    def resolve(self, tok: Token, role: str) -> IRI | Literal:
        if tok.kind == "iri":
            return IRI(normalize_iri(tok.text[1:-1]))
        if tok.kind == "pname":
            prefix, local = tok.text.split(":", 1)
            if prefix not in self.prefixes:
                raise _Skip(Diagnostic(tok.line, Code.UNDECLARED_PREFIX, f"undeclared prefix {prefix + ':'!r}"))
            return IRI(normalize_iri(self.prefixes[prefix] + local))
        if tok.kind == "string" and role == "object":
            try:
                value = unescape(tok.text[1:-1])
            except ValueError as exc:
                self.fail(tok, f"a valid string escape ({exc})")
            nxt = self.peek()
            if nxt.kind == "langtag" or nxt.kind == "directive":
                self.fail(nxt, "a plain string literal (language tags and datatypes are unsupported)")
            return Literal(value)
        if tok.kind == "name" and tok.text == "a" and role == "predicate":
            return TYPE
        self.fail(tok, f"an IRI or prefixed name as {role}")

    def triples_statement(self) -> None:
        subject = self.resolve(self.next(), "subject")
        pending: list[Diagnostic] = []
        while True:
            predicate = self.resolve(self.next(), "predicate")
            while True:
                tok = self.next()
                try:
                    obj = self.resolve(tok, "object")
                    self.triples.append(Triple(subject, predicate, obj))
                except _Skip as exc:
                    if exc.diagnostic.code is not Code.UNDECLARED_PREFIX:
                        raise
                    # keep the rest of the block; only this triple is dropped
                    pending.append(exc.diagnostic)
                sep = self.next()
                if sep.kind == "punct" and sep.text == ",":
                    continue
                break
            if sep.kind == "punct" and sep.text == ";":
                nxt = self.peek()
                if nxt.kind == "punct" and nxt.text == ".":
                    self.next()
                    break
                continue
            if sep.kind == "punct" and sep.text == ".":
                break
            self.diags.extend(pending)
            self.fail(sep, "';', ',' or '.'")
        self.diags.extend(pending)


def import_turtle(text: str) -> tuple[list[Triple], list[Diagnostic]]:
    """Parse the Turtle subset; returns triples in document order plus diagnostics."""
    triples, diags = _TurtleReader(text).run()
    return triples, sorted(diags, key=lambda d: (d.line, d.code.value, d.message))


# -- triples -> graph -------------------------------------------------------------


def _local(iri: IRI, base: str) -> str | None:
    if iri.value.startswith(base):
        return iri.value[len(base):]
    return None


def from_triples(triples: Iterable[Triple]) -> tuple[Graph, list[Diagnostic]]:
    """Rebuild the asserted records of a graph from its triple view.

    Derived triples (copy classes, descendant edges, aggregates, canonicity)
    are ignored; they are recomputed from the rebuilt graph.
    """
    by_subject: dict[IRI, dict[IRI, list[Term]]] = defaultdict(lambda: defaultdict(list))
    reverse: dict[IRI, dict[IRI, list[IRI]]] = defaultdict(lambda: defaultdict(list))
    for t in triples:
        by_subject[t.subject][t.predicate].append(t.object)
        if isinstance(t.object, IRI):
            reverse[t.object][t.predicate].append(t.subject)
    diags: list[Diagnostic] = []
    records = []

    def ids(values) -> list[str]:
        out = []
        for v in values:
            i = entity_id(v)
            if i is None:
                raise TacioError(f"{_render(v)} is not an entity IRI")
            out.append(i)
        return out

    def one(values, what: str):
        if len(values) != 1:
            raise TacioError(f"expected exactly one {what}, found {len(values)}")
        return values[0]

    def literal(values, what: str, default=None):
        if not values:
            if default is None:
                raise TacioError(f"missing {what}")
            return default
        v = one(values, what)
        if not isinstance(v, Literal):
            raise TacioError(f"{what} must be a literal")
        return v.value

    def cco_types(types, exclude) -> list[str]:
        return sorted(
            local for t in types
            if isinstance(t, IRI) and t not in exclude and (local := _local(t, CCO_NS)) is not None
            and not t.value.startswith(TACIO_NS)
        )

    for subject in sorted(by_subject, key=term_key):
        props = by_subject[subject]
        types = set(props.get(TYPE, ()))
        sid = entity_id(subject)
        if sid is None:
            continue
        try:
            if INFORMATION_BEARER in types:
                records.append(Carrier(
                    sid,
                    one(cco_types(types, ()), "carrier type"),
                    literal(props.get(HAS_CONCRETIZER_TYPE, []), "concretizer type"),
                    ids(props.get(IS_CARRIER_OF, [])),
                    ids(props.get(HAS_PART, [])),
                ))
            elif ICSE in types:
                records.append(Icse(
                    sid,
                    literal(props.get(EXPECTED_CARRIER_TYPE, []), "expected carrier type"),
                    literal(props.get(EXPECTED_CONCRETIZER_TYPE, []), "expected concretizer type"),
                    literal(props.get(HAS_PAYLOAD, []), "payload", default=""),
                ))
            elif AGENT in types:
                agent_types = cco_types(types, {AGENT})
                records.append(Agent(sid, one(agent_types, "agent type") if agent_types else None,
                                     ids(props.get(HAS_PART, []))))
            elif DEFEATER in types:
                records.append(Defeater(
                    sid,
                    one(ids(reverse[subject].get(HAS_DEFEATER, [])), "defeater target"),
                    DefeaterKind(literal(props.get(DEFEATER_KIND, []), "defeater kind")),
                    literal(props.get(STATEMENT, []), "statement", default=""),
                ))
            elif kinds := [k for k, t in ACT_KIND_TYPES.items() if t in types]:
                kind = one(kinds, "act kind")
                reference = ids(props.get(HAS_REFERENCE_CARRIER, []))
                inputs = set(ids(props.get(HAS_INPUT, []))) - set(reference)
                subs = ids(props.get(HAS_PROCESS_PART, []))
                order = {}
                for sub in subs:
                    idx = literal(by_subject[entity_iri(sub)].get(PROCESS_PART_INDEX, []), "sub-act index")
                    order[sub] = int(idx)
                act_types = cco_types(types, {PPF, INTENTIONAL_ACT})
                outputs = ids(props.get(HAS_OUTPUT, []))
                records.append(EncodingAct(
                    id=sid,
                    act_kind=kind,
                    agent=one(ids(reverse[subject].get(AGENT_IN, [])), "agent"),
                    output=one(outputs, "output") if outputs else None,
                    reference=one(reference, "reference carrier") if reference else None,
                    ppf=PPF in types,
                    sub_acts=sorted(subs, key=order.__getitem__),
                    prescribed_by=one(ids(props[PRESCRIBED_BY]), "prescription") if PRESCRIBED_BY in props else None,
                    at=literal(props.get(OCCURS_AT, []), "timestamp", default="") or None,
                    inputs=inputs,
                    act_type=one(act_types, "act type") if act_types else None,
                ))
            elif ICE in types:
                records.append(ContentItem(
                    sid,
                    literal(props.get(HAS_DIGEST, []), "digest", default="") or None,
                    ids(props.get(DESCRIBES, [])),
                ))
        except (TacioError, ValueError) as exc:
            diags.append(Diagnostic(0, Code.INVALID_FIELD, f"{_render(subject)}: {exc}", sid))

    g = Graph()
    order = {Agent: 0, Carrier: 0, Icse: 0, ContentItem: 1, EncodingAct: 2, Defeater: 3}
    for r in sorted(records, key=lambda r: (order[type(r)], r.id)):
        try:
            g.add(r)
        except TacioError as exc:
            diags.append(Diagnostic(0, Code.INVALID_FIELD, str(exc), r.id))
    diags.extend(validate(g))
    return g, diags


def load_turtle(text: str) -> tuple[Graph, list[Diagnostic]]:
    triples, diags = import_turtle(text)
    g, more = from_triples(triples)
    return g, diags + more
