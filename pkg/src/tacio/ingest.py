"""Line-delimited JSON event logs.

Each non-blank line that does not start with ``#`` holds one JSON object with
a ``kind`` field.  Loading is total: every bad line becomes a
:class:`~tacio.errors.Diagnostic` and the remaining lines still build a graph.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable

from .errors import Code, Diagnostic, TacioError, DuplicateId, SecondProducer
from .model import (
    ActKind,
    Agent,
    Carrier,
    ContentItem,
    Defeater,
    EncodingAct,
    Graph,
    Icse,
    validate,
)

__all__ = ["Event", "EventError", "SKIP", "dump_log", "load_log", "parse_event"]

log = logging.getLogger(__name__)

SKIP = None

_ACT_KINDS = {k.value: k for k in ActKind}

# kind -> (required fields, optional fields), in canonical output order
_SCHEMA: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "agent": (("id",), ("agent_type", "parts")),
    "content": (("id",), ("digest", "about")),
    "carrier": (("id", "carrier_type", "concretizer_type"), ("carries", "parts")),
    "icse": (("id", "expected_carrier_type", "expected_concretizer_type"), ("payload",)),
    "act": (
        ("id", "act_kind", "agent", "output"),
        ("reference", "ppf", "sub_acts", "prescribed_by", "at", "inputs", "act_type"),
    ),
    "defeater": (("id", "target", "defeater_kind"), ("statement",)),
}
_LISTS = {"about", "carries", "parts", "sub_acts", "inputs"}
# Insertion order: declarations first, then acts, then defeaters (which may target acts).
_PASS = {"agent": 0, "carrier": 0, "icse": 0, "content": 1, "act": 2, "defeater": 3}


@dataclass(frozen=True)
class Event:
    kind: str
    record: object
    line: int
    extra: tuple[str, ...] = ()


class EventError(TacioError):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


def _fail(line_no: int, code: Code, message: str, subject: str = ""):
    raise EventError(Diagnostic(line_no, code, message, subject))


def _record(kind: str, obj: dict):
    if kind == "agent":
        return Agent(obj["id"], obj.get("agent_type"), obj.get("parts", ()))
    if kind == "content":
        return ContentItem(obj["id"], obj.get("digest"), obj.get("about", ()))
    if kind == "carrier":
        return Carrier(
            obj["id"], obj["carrier_type"], obj["concretizer_type"],
            obj.get("carries", ()), obj.get("parts", ()),
        )
    if kind == "icse":
        return Icse(
            obj["id"], obj["expected_carrier_type"], obj["expected_concretizer_type"],
            obj.get("payload", ""),
        )
    if kind == "defeater":
        return Defeater(obj["id"], obj["target"], obj["defeater_kind"], obj.get("statement", ""))
    return EncodingAct(
        id=obj["id"],
        act_kind=_ACT_KINDS[obj["act_kind"]],
        agent=obj["agent"],
        output=obj.get("output"),
        reference=obj.get("reference"),
        ppf=obj.get("ppf", False),
        sub_acts=obj.get("sub_acts", ()),
        prescribed_by=obj.get("prescribed_by"),
        at=obj.get("at"),
        inputs=obj.get("inputs", ()),
        act_type=obj.get("act_type"),
    )


def parse_event(line_text: str | bytes, line_no: int) -> Event | None:
    """Parse one log line.

    Returns :data:`SKIP` (None) for blank and comment lines; raises
    :class:`EventError` carrying a diagnostic for anything malformed.
    """
    if isinstance(line_text, bytes):
        try:
            line_text = line_text.decode("utf-8")
        except UnicodeDecodeError as exc:
            _fail(line_no, Code.SYNTAX, f"not valid UTF-8: {exc.reason}")
    text = line_text.strip()
    if not text or text.startswith("#"):
        return SKIP
    try:
        obj = json.loads(text)
    except (ValueError, RecursionError) as exc:
        _fail(line_no, Code.SYNTAX, f"malformed JSON object: {exc}")
    if not isinstance(obj, dict):
        _fail(line_no, Code.SYNTAX, "expected a JSON object")
    kind = obj.get("kind")
    if not isinstance(kind, str) or kind not in _SCHEMA:
        _fail(line_no, Code.UNKNOWN_KIND, f"unknown event kind {kind!r}")
    required, optional = _SCHEMA[kind]
    subject = obj.get("id") if isinstance(obj.get("id"), str) else ""
    # copying needs both ends; process acts need no output
    if kind == "act":
        act_kind = obj.get("act_kind")
        if not isinstance(act_kind, str) or act_kind not in _ACT_KINDS:
            if act_kind is None:
                _fail(line_no, Code.MISSING_FIELD, "act is missing field 'act_kind'", subject)
            _fail(line_no, Code.INVALID_FIELD, f"unknown act_kind {act_kind!r}", subject)
        if act_kind == "copying":
            required = required + ("reference",)
        elif act_kind == "process":
            required = tuple(f for f in required if f != "output")
    for name in required:
        if name not in obj or obj[name] is None:
            _fail(line_no, Code.MISSING_FIELD, f"{kind} is missing field {name!r}", subject)
    if kind == "defeater" and obj["defeater_kind"] not in ("rebutting", "undercutting"):
        _fail(line_no, Code.INVALID_FIELD, f"unknown defeater_kind {obj['defeater_kind']!r}", subject)
    for name in _LISTS & obj.keys():
        value = obj[name]
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            _fail(line_no, Code.INVALID_FIELD, f"field {name!r} must be a list of ids", subject)
    for name in set(required) | (set(optional) & obj.keys()):
        if name in _LISTS or name == "ppf" or obj[name] is None:
            continue
        if not isinstance(obj[name], str):
            _fail(line_no, Code.INVALID_FIELD, f"field {name!r} must be a string", subject)
    extra = tuple(sorted(obj.keys() - set(required) - set(optional) - {"kind"}))
    try:
        record = _record(kind, obj)
    except TacioError as exc:
        _fail(line_no, Code.INVALID_FIELD, str(exc), subject)
    return Event(kind, record, line_no, extra)


def load_log(lines: Iterable[str | bytes], verbosity: int = 0) -> tuple[Graph, list[Diagnostic]]:
    """Build a graph from log lines; forward references are allowed.

    The graph is returned even when diagnostics are present.  Callers should
    treat any diagnostic as a failed load unless they opt into leniency.
    """
    diags: list[Diagnostic] = []
    events: list[Event] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(lines, start=1):
        try:
            ev = parse_event(line, line_no)
        except EventError as exc:
            diags.append(exc.diagnostic)
            continue
        if ev is SKIP:
            continue
        if ev.extra and verbosity >= 2:
            log.info("line %d: ignoring unknown fields %s", line_no, ", ".join(ev.extra))
        rid = ev.record.id
        if rid in seen:
            diags.append(Diagnostic(
                line_no, Code.DUPLICATE_ID,
                f"id {rid!r} already declared on line {seen[rid]}", rid,
            ))
            continue
        seen[rid] = line_no
        events.append(ev)

    g = Graph()
    for ev in sorted(events, key=lambda e: (_PASS[e.kind], e.line)):
        try:
            g.add(ev.record)
        except SecondProducer as exc:
            diags.append(Diagnostic(ev.line, Code.SECOND_PRODUCER, str(exc), ev.record.id))
        except DuplicateId as exc:
            diags.append(Diagnostic(ev.line, Code.DUPLICATE_ID, str(exc), ev.record.id))
        except TacioError as exc:
            # defeater whose target is not an act or carrier
            diags.append(Diagnostic(ev.line, Code.DANGLING_REF, str(exc), ev.record.id))

    for d in validate(g):
        diags.append(Diagnostic(seen.get(d.subject, 0), d.code, d.message, d.subject))
    diags.sort(key=lambda d: (d.line, d.code.value, d.message))
    return g, diags


def _event_object(kind: str, record) -> dict:
    required, optional = _SCHEMA[kind]
    out = {"kind": kind}
    for name in required + optional:
        attr = {"defeater_kind": "kind"}.get(name, name)
        value = getattr(record, attr)
        if hasattr(value, "value"):
            value = value.value
        if isinstance(value, (frozenset, set)):
            value = sorted(value)
        elif isinstance(value, tuple):
            value = list(value)
        if value is None or (name in optional and value in ([], "", False)):
            continue
        out[name] = value
    return out


def dump_log(g: Graph) -> list[str]:
    """Serialize ``g`` as event lines: canonical field order, records sorted by kind then id."""
    tables = (
        ("agent", g.agents), ("content", g.contents), ("carrier", g.carriers),
        ("icse", g.icses), ("act", g.acts), ("defeater", g.defeaters),
    )
    lines = []
    for kind, table in tables:
        for rid in sorted(table):
            obj = _event_object(kind, table[rid])
            lines.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
    return lines
