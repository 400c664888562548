"""Copy lineage: descendant/ancestor closure, copy-act classes, and aggregates.

Every copying act, atomic or composite, contributes one descendant edge
``reference -> output``.  Earliest ancestors are found by walking atomic copy
producers only, so the shortcut edges of composite acts never move a root.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from enum import Enum

from .errors import NotACopyAct, UnknownId
from .model import Carrier, EncodingAct, Graph, same_content

__all__ = [
    "Aggregate",
    "AggregateClass",
    "CopyClass",
    "aggregate_of",
    "all_aggregates",
    "ancestors",
    "atomic_parent",
    "classify_copy_act",
    "connecting_acts",
    "copy_class_for",
    "descendant_edges",
    "descendants",
    "earliest_ancestor",
    "successful",
]


class CopyClass(str, Enum):
    DUPLICATION = "Duplication"
    CARRIER_TRANSITION = "CarrierTransition"
    CONCRETIZER_TRANSITION = "ConcretizerTransition"
    CARRIER_AND_CONCRETIZER_TRANSITION = "CarrierAndConcretizerTransition"


class AggregateClass(str, Enum):
    DUPLICATES = "Duplicates"
    PSEUDO_DUPLICATES = "PseudoDuplicates"


@dataclass(frozen=True)
class Aggregate:
    root: str
    members: frozenset[str]
    classification: AggregateClass

    def __len__(self) -> int:
        return len(self.members)


def copy_class_for(reference: Carrier, output: Carrier) -> CopyClass:
    carrier_changes = reference.carrier_type != output.carrier_type
    concretizer_changes = reference.concretizer_type != output.concretizer_type
    if carrier_changes and concretizer_changes:
        return CopyClass.CARRIER_AND_CONCRETIZER_TRANSITION
    if carrier_changes:
        return CopyClass.CARRIER_TRANSITION
    if concretizer_changes:
        return CopyClass.CONCRETIZER_TRANSITION
    return CopyClass.DUPLICATION


def _copy_act(g: Graph, act_id: str) -> EncodingAct:
    act = g.acts.get(act_id)
    if act is None:
        raise UnknownId(f"no act {act_id!r}")
    if not act.is_copy:
        raise NotACopyAct(f"act {act_id!r} is a {act.act_kind.value} act, not a copying act")
    return act


def _carrier(g: Graph, carrier_id: str) -> Carrier:
    try:
        return g.carriers[carrier_id]
    except KeyError:
        raise UnknownId(f"no carrier {carrier_id!r}") from None


def successful(g: Graph, act: str) -> bool:
    """True iff the output carries some content identical to content the reference carries."""
    a = _copy_act(g, act)
    ref, out = _carrier(g, a.reference), _carrier(g, a.output)
    ref_contents = [g.contents[c] for c in sorted(ref.carries) if c in g.contents]
    out_contents = [g.contents[c] for c in sorted(out.carries) if c in g.contents]
    return any(same_content(r, o) for r in ref_contents for o in out_contents)


def classify_copy_act(g: Graph, act: str) -> CopyClass:
    a = _copy_act(g, act)
    return copy_class_for(_carrier(g, a.reference), _carrier(g, a.output))


class _Index:
    def __init__(self, g: Graph):
        self.edges: set[tuple[str, str]] = set()
        self.children: dict[str, set[str]] = defaultdict(set)
        self.parents: dict[str, set[str]] = defaultdict(set)
        self.atomic_parent: dict[str, str] = {}
        self.atomic_act: dict[str, str] = {}
        for act in g.acts.values():
            if not act.is_copy:
                continue
            self.edges.add((act.reference, act.output))
            self.children[act.reference].add(act.output)
            self.parents[act.output].add(act.reference)
            if act.atomic:
                self.atomic_parent.setdefault(act.output, act.reference)
                self.atomic_act.setdefault(act.output, act.id)


def _index(g: Graph) -> _Index:
    return g._index("lineage", lambda: _Index(g))


def _closure(start: str, step: dict[str, set[str]]) -> set[str]:
    seen: set[str] = set()
    queue = deque(step.get(start, ()))
    while queue:
        node = queue.popleft()
        if node in seen:
            continue
        seen.add(node)
        queue.extend(step.get(node, ()))
    seen.discard(start)
    return seen


def descendant_edges(g: Graph) -> set[tuple[str, str]]:
    return set(_index(g).edges)


def descendants(g: Graph, x: str) -> set[str]:
    _carrier(g, x)
    return _closure(x, _index(g).children)


def ancestors(g: Graph, x: str) -> set[str]:
    _carrier(g, x)
    return _closure(x, _index(g).parents)


def atomic_parent(g: Graph, x: str) -> str | None:
    """Reference carrier of the atomic copying act that produced ``x``."""
    return _index(g).atomic_parent.get(x)


def atomic_copy_producer(g: Graph, x: str) -> str | None:
    """Id of the atomic copying act that produced ``x``."""
    return _index(g).atomic_act.get(x)


def atomic_path(g: Graph, root: str, x: str) -> list[str] | None:
    """Carriers on the atomic copy path ``root -> ... -> x``, or None if there is none."""
    path, seen = [x], {x}
    parents = _index(g).atomic_parent
    node = x
    while node != root:
        node = parents.get(node)
        if node is None or node in seen:
            return None
        seen.add(node)
        path.append(node)
    path.reverse()
    return path


def earliest_ancestor(g: Graph, x: str) -> str:
    _carrier(g, x)
    parents = _index(g).atomic_parent
    node, seen = x, {x}
    while node in parents:
        node = parents[node]
        if node in seen:
            # cyclic lineage; validate() reports it
            break
        seen.add(node)
    return node


def is_root(g: Graph, x: str) -> bool:
    return x in g.carriers and x not in _index(g).atomic_parent


def connecting_acts(g: Graph, members) -> list[str]:
    """Atomic copying acts linking two members of an aggregate."""
    members = set(members)
    return sorted(
        act.id
        for act in g.acts.values()
        if act.is_copy and act.atomic and act.reference in members and act.output in members
    )


def _classify(g: Graph, members: frozenset[str]) -> AggregateClass:
    for act_id in connecting_acts(g, members):
        if classify_copy_act(g, act_id) is not CopyClass.DUPLICATION:
            return AggregateClass.PSEUDO_DUPLICATES
    return AggregateClass.DUPLICATES


def aggregate_of(g: Graph, x: str) -> Aggregate:
    root = earliest_ancestor(g, x)
    members = frozenset({root} | descendants(g, root))
    return Aggregate(root, members, _classify(g, members))


def all_aggregates(g: Graph) -> list[Aggregate]:
    return [aggregate_of(g, c) for c in sorted(g.carriers) if is_root(g, c)]
