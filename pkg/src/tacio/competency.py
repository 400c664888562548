"""Canned competency queries and the fixtures that instantiate them."""

from __future__ import annotations

from importlib import resources

from .errors import UnknownCompetencyId
from .ingest import load_log
from .model import Graph
from .query import BgpQuery, BindingTable, evaluate, parse_query
from .rdf import to_triples

__all__ = ["CQ_IDS", "FIXTURES", "competency_query", "load_fixture", "run_competency"]

CQ_IDS = ("CQ1a", "CQ1b", "CQ1c", "CQ2a", "CQ2b", "CQ3a", "CQ3b", "CQ4a", "CQ4b", "CQ5a", "CQ5b")

FIXTURES = {
    "CQ1a": "cq1a_email",
    "CQ1b": "cq1b_ssd_monitor",
    "CQ1c": "cq1c_snapshot_backup",
    "CQ2a": "cq2a_traffic",
    "CQ2b": "cq2b_marine",
    "CQ3a": "cq3a_fanout",
    "CQ3b": "cq3b_snapshot_drives",
    "CQ4a": "cq4a_password_ssl",
    "CQ4b": "cq4b_password_http",
    "CQ5a": "cq5a_shared_document",
    "CQ5b": "cq5b_repository",
}


def _check(cq_id: str) -> str:
    if cq_id not in CQ_IDS:
        raise UnknownCompetencyId(f"unknown competency question {cq_id!r}; expected one of {', '.join(CQ_IDS)}")
    return cq_id


def competency_query_text(cq_id: str) -> str:
    return resources.files("tacio.queries").joinpath(f"{_check(cq_id)}.rq").read_text(encoding="utf-8")


def competency_query(cq_id: str) -> BgpQuery:
    return parse_query(competency_query_text(cq_id))


def fixture_path(name: str):
    """Path-like handle to a shipped fixture, by fixture name or competency id."""
    name = FIXTURES.get(name, name)
    path = resources.files("tacio.fixtures").joinpath(f"{name}.jsonl")
    if not path.is_file():
        raise FileNotFoundError(f"no shipped fixture {name!r}")
    return path


def fixture_lines(name: str) -> list[str]:
    return fixture_path(name).read_text(encoding="utf-8").splitlines()


def load_fixture(name: str) -> Graph:
    """Load a shipped fixture; fixtures are expected to load without diagnostics."""
    g, diags = load_log(fixture_lines(name))
    if diags:
        raise ValueError(f"fixture {name!r} does not load cleanly: {diags[0]}")
    return g


def run_competency(cq_id: str, g: Graph, chain_rule: bool = True) -> BindingTable:
    return evaluate(competency_query(cq_id), to_triples(g, chain_rule))
