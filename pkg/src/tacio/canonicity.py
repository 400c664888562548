"""Canonical copies and canonical members under a defeater model.

The conditions implemented here are sufficient, not necessary: a verdict with
``holds=False`` means "not established by these conditions", never "known to be
unfaithful".  Conversely a canonical copy may still fail a checksum check;
:func:`verify_fidelity` is deliberately independent of canonicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import lineage
from .errors import NotACopyAct, NotAMember, NotARoot, UnknownId
from .model import Defeater, DefeaterKind, Graph

__all__ = [
    "CanonicityVerdict",
    "Fidelity",
    "Via",
    "canonical_copies_of",
    "canonical_members",
    "defeaters_for",
    "is_canonical_copy",
    "is_canonical_member",
    "register_mismatch_defeater",
    "verify_fidelity",
]


class Via(str, Enum):
    DIRECT_PPF_ACT = "DirectPpfAct"
    PPF_CHAIN = "PpfChain"
    COMPOSITE_PPF_ACT = "CompositePpfAct"


class Fidelity(str, Enum):
    VERIFIED = "Verified"
    MISMATCH = "Mismatch"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CanonicityVerdict:
    holds: bool
    via: Via | None = None
    blocking: frozenset[str] = field(default_factory=frozenset)

    def __bool__(self) -> bool:
        return self.holds

    def __str__(self) -> str:
        if self.holds:
            return f"canonical via {self.via.value}"
        if self.blocking:
            return "not canonical: blocked by " + ", ".join(sorted(self.blocking))
        return "not established as canonical"


def _require(g: Graph, entity_id: str) -> None:
    if entity_id not in g.acts and entity_id not in g.carriers:
        raise UnknownId(f"no act or carrier {entity_id!r}")


def defeaters_for(g: Graph, target: str) -> set[Defeater]:
    """Defeaters on ``target`` itself and, for a carrier, on the atomic act that produced it."""
    _require(g, target)
    found = list(g.defeaters_on(target))
    if target in g.carriers:
        producer = g.atomic_producer(target)
        if producer is not None:
            found.extend(g.defeaters_on(producer))
    return set(found)


def _qualifying_acts(g: Graph, x: str, y: str):
    """PPF copying acts with output x and reference y, paired with their blockers."""
    for act in sorted(g.acts.values(), key=lambda a: a.id):
        if act.is_copy and act.ppf and act.output == x and act.reference == y:
            blockers = {d.id for d in defeaters_for(g, x) | defeaters_for(g, act.id)}
            yield act, blockers


def _direct_verdict(g: Graph, x: str, y: str) -> CanonicityVerdict:
    blocking: set[str] = set()
    for act, blockers in _qualifying_acts(g, x, y):
        if not blockers:
            return CanonicityVerdict(True, Via.DIRECT_PPF_ACT if act.atomic else Via.COMPOSITE_PPF_ACT)
        blocking |= blockers
    return CanonicityVerdict(False, blocking=frozenset(blocking))


def _carriers(g: Graph, *ids: str) -> None:
    for i in ids:
        if i not in g.carriers:
            raise UnknownId(f"no carrier {i!r}")


def is_canonical_copy(g: Graph, x: str, y: str) -> CanonicityVerdict:
    """Whether ``x`` is a canonical copy of reference carrier ``y``.

    Defeaters on ``y`` are irrelevant; only doubt about ``x`` or about the
    producing act blocks the verdict.
    """
    _carriers(g, x, y)
    return _direct_verdict(g, x, y)


def canonical_copies_of(g: Graph, y: str) -> set[str]:
    _carriers(g, y)
    outputs = {a.output for a in g.acts.values() if a.is_copy and a.reference == y}
    return {x for x in outputs if x in g.carriers and is_canonical_copy(g, x, y).holds}


def is_canonical_member(g: Graph, x: str, root: str, chain_rule: bool = True) -> CanonicityVerdict:
    """Whether ``x`` is a canonical member of the aggregate whose earliest ancestor is ``root``.

    A PPF copying act (atomic or composite) from ``root`` straight to ``x``
    suffices.  With ``chain_rule`` on, so does an atomic path from ``root`` to
    ``x`` on which every hop is a canonical copy of the previous carrier.
    """
    _carriers(g, x, root)
    if not lineage.is_root(g, root):
        raise NotAMember(f"{root!r} is not the earliest ancestor of an aggregate")
    if x != root and x not in lineage.descendants(g, root):
        raise NotAMember(f"{x!r} is not a member of the aggregate rooted at {root!r}")
    direct = _direct_verdict(g, x, root)
    if direct.holds or not chain_rule:
        return direct
    path = lineage.atomic_path(g, root, x)
    if path is None or len(path) < 3:
        # a one-hop path was already judged as a direct act
        return direct
    hops = [is_canonical_copy(g, out, ref) for ref, out in zip(path, path[1:])]
    if all(h.holds for h in hops):
        return CanonicityVerdict(True, Via.PPF_CHAIN)
    blocking = set(direct.blocking)
    # hop defeaters only count when defeat is the sole reason the chain fails
    if all(h.holds or h.blocking for h in hops):
        for h in hops:
            blocking |= h.blocking
    return CanonicityVerdict(False, blocking=frozenset(blocking))


def canonical_members(g: Graph, root: str, chain_rule: bool = True) -> set[str]:
    if root not in g.carriers:
        raise UnknownId(f"no carrier {root!r}")
    if not lineage.is_root(g, root):
        raise NotARoot(f"{root!r} has an atomic copy producer; it is not an aggregate root")
    return {
        x
        for x in lineage.descendants(g, root)
        if is_canonical_member(g, x, root, chain_rule).holds
    }


def _digests(g: Graph, carrier_id: str) -> set[str] | None:
    carrier = g.carriers[carrier_id]
    digests = set()
    for cid in carrier.carries:
        content = g.contents.get(cid)
        if content is None or content.digest is None:
            return None
        digests.add(content.digest)
    return digests or None


def verify_fidelity(g: Graph, act: str) -> Fidelity:
    """Compare content digests on both ends of a copying act."""
    a = g.acts.get(act)
    if a is None:
        raise UnknownId(f"no act {act!r}")
    if not a.is_copy:
        raise NotACopyAct(f"act {act!r} is not a copying act")
    _carriers(g, a.reference, a.output)
    ref, out = _digests(g, a.reference), _digests(g, a.output)
    if ref is None or out is None:
        return Fidelity.UNKNOWN
    return Fidelity.VERIFIED if ref == out else Fidelity.MISMATCH


def register_mismatch_defeater(g: Graph, act: str) -> Defeater | None:
    """Record a rebutting defeater on ``act`` when its digests disagree.

    Returns the new defeater, or None when the act verifies, cannot be checked,
    or already carries this defeater.
    """
    if verify_fidelity(g, act) is not Fidelity.MISMATCH:
        return None
    did = f"{act}.fidelity-mismatch"
    if did in g.defeaters:
        return None
    d = Defeater(did, act, DefeaterKind.REBUTTING, "checksum of output differs from reference")
    g.add_defeater(d)
    return d
