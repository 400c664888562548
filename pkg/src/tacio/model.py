"""Typed in-memory store for contents, carriers, acts, prescriptions and defeaters.

A :class:`Graph` holds one record per entity id.  Records are frozen
dataclasses; the graph itself is mutated only through the ``add_*`` methods,
which check the constraints that can be decided locally.  Whole-graph
constraints (dangling references, cycles, composite acts whose reference is
not an ancestor of their output) are reported by :func:`validate`, so that
forward references remain legal while a graph is being built.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    Code,
    DanglingTarget,
    Diagnostic,
    DuplicateId,
    InvalidField,
    MissingReference,
    SecondProducer,
    UnknownId,
)

__all__ = [
    "ActKind",
    "Agent",
    "Carrier",
    "ContentItem",
    "Defeater",
    "DefeaterKind",
    "EncodingAct",
    "Graph",
    "Icse",
    "carriers_of",
    "same_content",
    "validate",
]

_ID_RE = re.compile(r'^[^\s"]+$')
# Type tokens double as local names in the RDF view.
_TOKEN_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_DIGEST_RE = re.compile(r"^[A-Za-z0-9]+:[0-9A-Fa-f]+$")
_RFC3339_RE = re.compile(
    r"^\d{4}-\d{2}-\d{2}[Tt ]\d{2}:\d{2}:\d{2}(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$"
)
# Type names the RDF view uses to tell record kinds apart; agent and act types may not shadow them.
RESERVED_TYPES = frozenset({"Agent", "InformationContentEntity", "IntentionalAct", "ProcessOfProperFunctioning"})


class ActKind(str, Enum):
    ENCODING = "encoding"
    COPYING = "copying"
    ENCODING_ICSE = "encoding_icse"
    # Intentional acts that encode nothing, e.g. a controller's act of timing change.
    PROCESS = "process"


class DefeaterKind(str, Enum):
    REBUTTING = "rebutting"
    UNDERCUTTING = "undercutting"


def _check_id(value, what: str) -> str:
    if not isinstance(value, str) or not _ID_RE.match(value):
        raise InvalidField(f"{what}: invalid entity id {value!r}")
    return value


def _check_token(value, what: str) -> str:
    if not isinstance(value, str) or not _TOKEN_RE.match(value):
        raise InvalidField(f"{what}: expected a non-empty type token, got {value!r}")
    return value


def _id_set(values, what: str) -> frozenset[str]:
    if isinstance(values, str):
        raise InvalidField(f"{what}: expected a collection of ids, got a string")
    return frozenset(_check_id(v, what) for v in values)


def _set(obj, name: str, value) -> None:
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class ContentItem:
    """Information content.  ``digest`` stands in for content identity."""

    id: str
    digest: str | None = None
    about: frozenset[str] = frozenset()

    def __post_init__(self):
        _check_id(self.id, "content id")
        if self.digest is not None and (
            not isinstance(self.digest, str) or not _DIGEST_RE.match(self.digest)
        ):
            raise InvalidField(f"content {self.id}: digest {self.digest!r} is not algo:hex")
        _set(self, "about", _id_set(self.about, f"content {self.id} about"))


@dataclass(frozen=True)
class Carrier:
    """A material bearer of content, typed by what it is and by the pattern it bears."""

    id: str
    carrier_type: str
    concretizer_type: str
    carries: frozenset[str] = frozenset()
    parts: frozenset[str] = frozenset()

    def __post_init__(self):
        _check_id(self.id, "carrier id")
        _check_token(self.carrier_type, f"carrier {self.id} carrier_type")
        _check_token(self.concretizer_type, f"carrier {self.id} concretizer_type")
        _set(self, "carries", _id_set(self.carries, f"carrier {self.id} carries"))
        _set(self, "parts", _id_set(self.parts, f"carrier {self.id} parts"))


@dataclass(frozen=True)
class Icse:
    """A prescription for forming a copy of a reference carrier."""

    id: str
    expected_carrier_type: str
    expected_concretizer_type: str
    payload: str = ""

    def __post_init__(self):
        _check_id(self.id, "icse id")
        _check_token(self.expected_carrier_type, f"icse {self.id} expected_carrier_type")
        _check_token(self.expected_concretizer_type, f"icse {self.id} expected_concretizer_type")
        if not isinstance(self.payload, str):
            raise InvalidField(f"icse {self.id}: payload must be text")


@dataclass(frozen=True)
class Agent:
    id: str
    agent_type: str | None = None
    parts: frozenset[str] = frozenset()

    def __post_init__(self):
        _check_id(self.id, "agent id")
        if self.agent_type is not None:
            _check_token(self.agent_type, f"agent {self.id} agent_type")
            if self.agent_type in RESERVED_TYPES:
                raise InvalidField(f"agent {self.id}: agent_type {self.agent_type!r} is reserved")
        _set(self, "parts", _id_set(self.parts, f"agent {self.id} parts"))


@dataclass(frozen=True)
class EncodingAct:
    """An act of encoding, copying, ICSE encoding, or a plain intentional act.

    ``reference`` is mandatory for copying and forbidden otherwise.  ``inputs``
    lists further inputs that are not reference carriers (a fusing act reads
    several carriers).  An act with no ``sub_acts`` is atomic.
    """

    id: str
    act_kind: ActKind
    agent: str
    output: str | None = None
    reference: str | None = None
    ppf: bool = False
    sub_acts: tuple[str, ...] = ()
    prescribed_by: str | None = None
    at: str | None = None
    inputs: frozenset[str] = frozenset()
    act_type: str | None = None

    def __post_init__(self):
        _check_id(self.id, "act id")
        try:
            kind = ActKind(self.act_kind)
        except ValueError:
            raise InvalidField(f"act {self.id}: unknown act_kind {self.act_kind!r}") from None
        _set(self, "act_kind", kind)
        _check_id(self.agent, f"act {self.id} agent")
        if kind is ActKind.COPYING and self.reference is None:
            raise MissingReference(f"copying act {self.id} has no reference carrier")
        if kind is not ActKind.COPYING and self.reference is not None:
            raise InvalidField(f"act {self.id}: only copying acts take a reference carrier")
        if self.reference is not None:
            _check_id(self.reference, f"act {self.id} reference")
        if self.output is None:
            if kind is not ActKind.PROCESS:
                raise InvalidField(f"act {self.id}: {kind.value} act requires an output")
        else:
            _check_id(self.output, f"act {self.id} output")
        if not isinstance(self.ppf, bool):
            raise InvalidField(f"act {self.id}: ppf must be a boolean")
        if isinstance(self.sub_acts, str):
            raise InvalidField(f"act {self.id}: sub_acts must be a sequence")
        subs = tuple(_check_id(s, f"act {self.id} sub_acts") for s in self.sub_acts)
        if len(set(subs)) != len(subs):
            raise InvalidField(f"act {self.id}: repeated sub-act")
        if self.id in subs:
            raise InvalidField(f"act {self.id} lists itself as a sub-act")
        _set(self, "sub_acts", subs)
        if self.prescribed_by is not None:
            _check_id(self.prescribed_by, f"act {self.id} prescribed_by")
        if self.at is not None and (not isinstance(self.at, str) or not _RFC3339_RE.match(self.at)):
            raise InvalidField(f"act {self.id}: timestamp {self.at!r} is not RFC 3339")
        _set(self, "inputs", _id_set(self.inputs, f"act {self.id} inputs"))
        if self.act_type is not None:
            _check_token(self.act_type, f"act {self.id} act_type")
            if self.act_type in RESERVED_TYPES:
                raise InvalidField(f"act {self.id}: act_type {self.act_type!r} is reserved")

    @property
    def atomic(self) -> bool:
        return not self.sub_acts

    @property
    def is_copy(self) -> bool:
        return self.act_kind is ActKind.COPYING


@dataclass(frozen=True)
class Defeater:
    """A recorded reason to doubt an act or carrier."""

    id: str
    target: str
    kind: DefeaterKind
    statement: str = ""

    def __post_init__(self):
        _check_id(self.id, "defeater id")
        _check_id(self.target, f"defeater {self.id} target")
        try:
            _set(self, "kind", DefeaterKind(self.kind))
        except ValueError:
            raise InvalidField(f"defeater {self.id}: unknown kind {self.kind!r}") from None
        if not isinstance(self.statement, str):
            raise InvalidField(f"defeater {self.id}: statement must be text")


_RECORD_TABLES = ("agents", "contents", "carriers", "icses", "acts", "defeaters")


@dataclass(eq=False)
class Graph:
    """All records of one provenance graph, keyed by id.

    Ids are unique across every record kind.  Described entities that are not
    declared as records are exposed through :attr:`topics`.
    """

    contents: dict[str, ContentItem] = field(default_factory=dict)
    carriers: dict[str, Carrier] = field(default_factory=dict)
    acts: dict[str, EncodingAct] = field(default_factory=dict)
    icses: dict[str, Icse] = field(default_factory=dict)
    defeaters: dict[str, Defeater] = field(default_factory=dict)
    agents: dict[str, Agent] = field(default_factory=dict)
    # Derived results (lineage index etc.); dropped on every mutation.
    cache: dict = field(default_factory=dict, repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return all(getattr(self, t) == getattr(other, t) for t in _RECORD_TABLES)

    def __contains__(self, entity_id: str) -> bool:
        return self.kind_of(entity_id) is not None

    @property
    def topics(self) -> frozenset[str]:
        """Described entities that are not themselves records of this graph."""
        about = {t for c in self.contents.values() for t in c.about}
        return frozenset(t for t in about if self._record_kind(t) is None)

    def _record_kind(self, entity_id: str) -> str | None:
        for table in _RECORD_TABLES:
            if entity_id in getattr(self, table):
                return table
        return None

    def kind_of(self, entity_id: str) -> str | None:
        """Name of the table holding ``entity_id`` ("topics" for bare topics), or None."""
        kind = self._record_kind(entity_id)
        if kind is None and entity_id in self.topics:
            return "topics"
        return kind

    def records(self) -> Iterator:
        for table in _RECORD_TABLES:
            yield from getattr(self, table).values()

    def _claim(self, entity_id: str) -> None:
        if self._record_kind(entity_id) is not None:
            raise DuplicateId(f"id {entity_id!r} is already in use")
        self.cache.clear()

    def add_content(self, c: ContentItem) -> "Graph":
        self._claim(c.id)
        self.contents[c.id] = c
        return self

    def add_carrier(self, c: Carrier) -> "Graph":
        self._claim(c.id)
        self.carriers[c.id] = c
        return self

    def add_icse(self, i: Icse) -> "Graph":
        self._claim(i.id)
        self.icses[i.id] = i
        return self

    def add_agent(self, a: Agent | str) -> "Graph":
        if isinstance(a, str):
            a = Agent(a)
        self._claim(a.id)
        self.agents[a.id] = a
        return self

    def add_act(self, a: EncodingAct) -> "Graph":
        if self._record_kind(a.id) is not None:
            raise DuplicateId(f"id {a.id!r} is already in use")
        if a.atomic and a.output is not None:
            other = self.atomic_producer(a.output)
            if other is not None:
                raise SecondProducer(
                    f"{a.output!r} is already the output of atomic act {other!r}; "
                    f"act {a.id!r} cannot produce it too"
                )
        self._claim(a.id)
        self.acts[a.id] = a
        return self

    def add_defeater(self, d: Defeater) -> "Graph":
        if self._record_kind(d.id) is not None:
            raise DuplicateId(f"id {d.id!r} is already in use")
        if d.target not in self.acts and d.target not in self.carriers:
            raise DanglingTarget(f"defeater {d.id!r} targets {d.target!r}, which is not an act or carrier")
        self._claim(d.id)
        self.defeaters[d.id] = d
        return self

    def add(self, record) -> "Graph":
        """Insert any record, dispatching on its type."""
        adder = {
            ContentItem: self.add_content,
            Carrier: self.add_carrier,
            Icse: self.add_icse,
            Agent: self.add_agent,
            EncodingAct: self.add_act,
            Defeater: self.add_defeater,
        }[type(record)]
        return adder(record)

    # Indexes. These are cheap enough to rebuild lazily after each mutation.

    def _index(self, name: str, build):
        if name not in self.cache:
            self.cache[name] = build()
        return self.cache[name]

    def atomic_producer(self, carrier_id: str) -> str | None:
        """Id of the atomic act whose output is ``carrier_id``, if any."""
        def build():
            out = {}
            for act in self.acts.values():
                if act.atomic and act.output is not None:
                    out.setdefault(act.output, act.id)
            return out

        return self._index("atomic_producer", build).get(carrier_id)

    def defeaters_on(self, target: str) -> list[Defeater]:
        """Defeaters whose target is exactly ``target``."""
        def build():
            out = defaultdict(list)
            for d in self.defeaters.values():
                out[d.target].append(d)
            return dict(out)

        return list(self._index("defeaters_by_target", build).get(target, ()))

    def containers(self) -> dict[str, list[str]]:
        """Map from act id to the composite acts listing it as a sub-act."""
        def build():
            out = defaultdict(list)
            for act in self.acts.values():
                for sub in act.sub_acts:
                    out[sub].append(act.id)
            return dict(out)

        return self._index("containers", build)

    def copy(self) -> "Graph":
        g = Graph()
        for table in _RECORD_TABLES:
            setattr(g, table, dict(getattr(self, table)))
        return g


def graph_from_records(records: Iterable) -> Graph:
    g = Graph()
    for r in records:
        g.add(r)
    return g


def same_content(a: ContentItem, b: ContentItem) -> bool:
    """Content identity: same id, or equal digests when both are known."""
    if a.id == b.id:
        return True
    return a.digest is not None and b.digest is not None and a.digest == b.digest


def carriers_of(g: Graph, content: str) -> set[str]:
    if content not in g.contents:
        raise UnknownId(f"no content item {content!r}")
    return {c.id for c in g.carriers.values() if content in c.carries}


# -- validation ---------------------------------------------------------------


def _cyclic_components(nodes: Iterable[str], succ) -> list[list[str]]:
    """Strongly connected components that contain a cycle (iterative Tarjan)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    result = []
    counter = 0
    for root in sorted(nodes):
        if root in index:
            continue
        work = [(root, iter(sorted(succ(root))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(succ(nxt)))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                if len(comp) > 1 or node in succ(node):
                    result.append(sorted(comp))
    return result


def validate(g: Graph) -> list[Diagnostic]:
    """Every integrity violation in ``g``; an empty list means well-formed."""
    diags: list[Diagnostic] = []

    def report(code: Code, subject: str, message: str) -> None:
        diags.append(Diagnostic(0, code, message, subject))

    def expect(subject: str, ref: str | None, tables: tuple[str, ...], role: str) -> None:
        if ref is None:
            return
        kind = g._record_kind(ref)
        if kind not in tables:
            found = f"a {kind[:-1]}" if kind else "undeclared"
            report(Code.DANGLING_REF, subject, f"{subject}: {role} {ref!r} is {found}")

    for c in g.carriers.values():
        for ref in sorted(c.carries):
            expect(c.id, ref, ("contents",), "carried content")
        for ref in sorted(c.parts):
            expect(c.id, ref, ("carriers",), "part")
    for a in g.agents.values():
        for ref in sorted(a.parts):
            expect(a.id, ref, ("agents",), "part")
    for act in g.acts.values():
        expect(act.id, act.agent, ("agents",), "agent")
        expect(act.id, act.reference, ("carriers",), "reference carrier")
        for ref in sorted(act.inputs):
            expect(act.id, ref, ("carriers",), "input")
        out_tables = ("icses",) if act.act_kind is ActKind.ENCODING_ICSE else ("carriers",)
        expect(act.id, act.output, out_tables, "output")
        for ref in act.sub_acts:
            expect(act.id, ref, ("acts",), "sub-act")
        expect(act.id, act.prescribed_by, ("icses",), "prescription")
    for d in g.defeaters.values():
        expect(d.id, d.target, ("acts", "carriers"), "target")

    for comp in _cyclic_components(g.carriers, lambda n: g.carriers[n].parts & g.carriers.keys()):
        report(Code.CYCLE, comp[0], f"has-part cycle among carriers {comp}")
    for comp in _cyclic_components(g.agents, lambda n: g.agents[n].parts & g.agents.keys()):
        report(Code.CYCLE, comp[0], f"has-part cycle among agents {comp}")
    for comp in _cyclic_components(g.acts, lambda n: set(g.acts[n].sub_acts) & g.acts.keys()):
        report(Code.CYCLE, comp[0], f"sub-act containment cycle among acts {comp}")
    for sub, owners in sorted(g.containers().items()):
        if len(owners) > 1 and sub in g.acts:
            report(Code.INVALID_FIELD, sub, f"act {sub!r} is a sub-act of several acts {sorted(owners)}")

    parent: dict[str, str] = {}
    for act in g.acts.values():
        if act.is_copy and act.atomic and act.output in g.carriers and act.reference in g.carriers:
            parent[act.output] = act.reference
    for comp in _cyclic_components(parent, lambda n: {parent[n]} if n in parent else set()):
        report(Code.CYCLE, comp[0], f"copy lineage cycle among carriers {comp}")

    for act in sorted(g.acts.values(), key=lambda a: a.id):
        if not (act.is_copy and not act.atomic):
            continue
        if act.reference not in g.carriers or act.output not in g.carriers:
            continue
        node, seen = act.output, set()
        while node in parent and node not in seen:
            seen.add(node)
            node = parent[node]
            if node == act.reference:
                break
        else:
            report(
                Code.COMPOSITE_SPAN,
                act.id,
                f"composite act {act.id!r}: reference {act.reference!r} is not an "
                f"ancestor of output {act.output!r}",
            )
    diags.sort(key=lambda d: (d.code.value, d.subject, d.message))
    return diags


def record_fields(record) -> dict:
    """Plain field mapping of a record (enums as values, sets sorted)."""
    out = {}
    for f in fields(record):
        v = getattr(record, f.name)
        if isinstance(v, Enum):
            v = v.value
        elif isinstance(v, frozenset):
            v = sorted(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out
