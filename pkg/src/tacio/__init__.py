"""Provenance engine for acts of encoding and copying information carriers.

Records contents, carriers and the acts that copy them; derives copy lineage
and aggregates; infers canonical copies under a defeater model; and answers
graph-pattern queries over an RDF-style view of the result.
"""

from .canonicity import (
    CanonicityVerdict,
    Fidelity,
    Via,
    canonical_copies_of,
    canonical_members,
    defeaters_for,
    is_canonical_copy,
    is_canonical_member,
    register_mismatch_defeater,
    verify_fidelity,
)
from .competency import CQ_IDS, load_fixture, run_competency
from .errors import Code, Diagnostic, ParseError, TacioError
from .ingest import dump_log, load_log, parse_event
from .lineage import (
    Aggregate,
    AggregateClass,
    CopyClass,
    aggregate_of,
    all_aggregates,
    ancestors,
    classify_copy_act,
    descendant_edges,
    descendants,
    earliest_ancestor,
    successful,
)
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
    carriers_of,
    validate,
)
from .query import BgpQuery, BindingTable, evaluate, parse_query
from .rdf import IRI, Literal, Triple, export_turtle, from_triples, import_turtle, to_triples

__version__ = "0.1.0"
