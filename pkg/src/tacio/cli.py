"""Command-line entry point.

Exit status is 0 on success, 1 for domain or parse failures and 2 for IO or
usage failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence, TextIO

from . import canonicity, lineage
from .competency import CQ_IDS, competency_query_text, fixture_lines
from .errors import Diagnostic, InvalidGraph, ParseError, TacioError, UnknownPrefix
from .ingest import load_log
from .model import Graph, validate
from .query import evaluate, parse_query
from .rdf import export_turtle, load_turtle, to_triples

__all__ = ["CliConfig", "InputFormat", "OutputMode", "main"]

OK, FAILED, USAGE = 0, 1, 2


class InputFormat(str, Enum):
    EVENTS = "events"
    TURTLE = "turtle"


class OutputMode(str, Enum):
    TABLE = "table"
    JSON_LINES = "json-lines"


_EXTENSIONS = {".jsonl": InputFormat.EVENTS, ".ttl": InputFormat.TURTLE}


@dataclass
class CliConfig:
    input_path: Path | None
    format: InputFormat | None = None
    chain_rule: bool = True
    lenient: bool = False
    output: OutputMode = OutputMode.TABLE

    def resolved_format(self) -> InputFormat:
        if self.format is not None:
            return self.format
        fmt = _EXTENSIONS.get(self.input_path.suffix.lower()) if self.input_path else None
        if fmt is None:
            raise _Usage(f"cannot infer format of {self.input_path}; pass --format")
        return fmt


class _Usage(Exception):
    pass


class _Failed(Exception):
    pass


def _print_diagnostics(diags: Sequence[Diagnostic], out: TextIO) -> None:
    for d in diags:
        print(str(d), file=out)


def _load(cfg: CliConfig, err: TextIO) -> tuple[Graph, list[Diagnostic]]:
    fmt = cfg.resolved_format()
    try:
        text = cfg.input_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Usage(f"cannot read {cfg.input_path}: {exc}") from None
    if fmt is InputFormat.EVENTS:
        return load_log(text.splitlines())
    return load_turtle(text)


def _load_checked(cfg: CliConfig, err: TextIO) -> Graph:
    g, diags = _load(cfg, err)
    if diags:
        _print_diagnostics(diags, err)
        if not cfg.lenient:
            raise _Failed(f"{len(diags)} diagnostic(s); rerun with --lenient to proceed anyway")
    return g


def cmd_validate(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    _, diags = _load(cfg, err)
    _print_diagnostics(diags, out)
    if diags:
        print(f"{len(diags)} diagnostic(s)", file=err)
        return FAILED
    print("ok", file=out)
    return OK


def _require_carrier(g: Graph, carrier: str) -> None:
    if carrier not in g.carriers:
        raise _Failed(f"unknown carrier {carrier!r}")


def cmd_lineage(cfg: CliConfig, carrier: str, out: TextIO, err: TextIO) -> int:
    g = _load_checked(cfg, err)
    _require_carrier(g, carrier)
    agg = lineage.aggregate_of(g, carrier)
    print(f"carrier: {carrier}", file=out)
    print(f"earliest ancestor: {agg.root}", file=out)
    print(f"ancestors: {', '.join(sorted(lineage.ancestors(g, carrier))) or '-'}", file=out)
    print(f"descendants: {', '.join(sorted(lineage.descendants(g, carrier))) or '-'}", file=out)
    print(f"aggregate: {agg.root} ({len(agg)} members, {agg.classification.value})", file=out)
    print(f"  members: {', '.join(sorted(agg.members))}", file=out)
    path = lineage.atomic_path(g, agg.root, carrier) or [carrier]
    if len(path) > 1:
        print("hops:", file=out)
    for ref, dst in zip(path, path[1:]):
        act = lineage.atomic_copy_producer(g, dst)
        cls = lineage.classify_copy_act(g, act).value
        ok = "successful" if lineage.successful(g, act) else "unsuccessful"
        print(f"  {ref} -> {dst} by {act}: {cls}, {ok}", file=out)
    return OK


def cmd_aggregates(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    g = _load_checked(cfg, err)
    for agg in lineage.all_aggregates(g):
        canon = canonicity.canonical_members(g, agg.root, cfg.chain_rule)
        print(f"{agg.root}: {len(agg)} members, {agg.classification.value}", file=out)
        print(f"  members: {', '.join(sorted(agg.members))}", file=out)
        print(f"  canonical members: {', '.join(sorted(canon)) or '-'}", file=out)
    return OK


def cmd_canonical(cfg: CliConfig, carrier: str, out: TextIO, err: TextIO) -> int:
    g = _load_checked(cfg, err)
    _require_carrier(g, carrier)
    references = sorted({a.reference for a in g.acts.values() if a.is_copy and a.output == carrier})
    for ref in references:
        print(f"canonical copy of {ref}: {canonicity.is_canonical_copy(g, carrier, ref)}", file=out)
    root = lineage.earliest_ancestor(g, carrier)
    if root == carrier:
        print(f"{carrier} is the earliest ancestor of its aggregate", file=out)
    else:
        verdict = canonicity.is_canonical_member(g, carrier, root, cfg.chain_rule)
        print(f"canonical member of {root}: {verdict}", file=out)
    return OK


def cmd_export(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    g = _load_checked(cfg, err)
    out.write(export_turtle(g, cfg.chain_rule))
    return OK


def cmd_query(cfg: CliConfig, query_path: Path | None, cq: str | None, out: TextIO, err: TextIO) -> int:
    if (query_path is None) == (cq is None):
        raise _Usage("give exactly one of a query file or --cq")
    if cq is not None:
        text = competency_query_text(cq)
    else:
        try:
            text = query_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise _Usage(f"cannot read {query_path}: {exc}") from None
    try:
        q = parse_query(text)
    except ParseError as exc:
        raise _Failed(f"query parse error: {exc}") from None
    if cfg.input_path is None:
        # a canned question with no input runs on its shipped fixture
        g, diags = load_log(fixture_lines(cq))
    else:
        g = _load_checked(cfg, err)
    table = evaluate(q, to_triples(g, cfg.chain_rule))
    if cfg.output is OutputMode.JSON_LINES:
        out.write(table.to_json_lines())
    else:
        print(table.render(), file=out)
    return OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in InputFormat],
                        help="input format (default: from the file extension)")
    common.add_argument("--lenient", action="store_true",
                        help="proceed despite load diagnostics")
    common.add_argument("--chain-rule", action=argparse.BooleanOptionalAction, default=True,
                        help="accept chains of canonical copies as canonical membership")
    common.add_argument("--output", choices=[m.value for m in OutputMode], default="table")

    p = argparse.ArgumentParser(prog="tacio", description="Copy provenance and canonicity over event logs.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="load and report diagnostics")
    s.add_argument("input", type=Path)
    s = sub.add_parser("lineage", parents=[common], help="lineage report for one carrier")
    s.add_argument("input", type=Path)
    s.add_argument("carrier")
    s = sub.add_parser("aggregates", parents=[common], help="list aggregates")
    s.add_argument("input", type=Path)
    s = sub.add_parser("canonical", parents=[common], help="canonicity verdicts for one carrier")
    s.add_argument("input", type=Path)
    s.add_argument("carrier")
    s = sub.add_parser("export", parents=[common], help="write the Turtle view to stdout")
    s.add_argument("input", type=Path)
    s = sub.add_parser("query", parents=[common], help="run a query file or a canned question")
    s.add_argument("input", type=Path, nargs="?",
                   help="graph to query (optional with --cq: defaults to the shipped fixture)")
    s.add_argument("query", type=Path, nargs="?")
    s.add_argument("--cq", choices=CQ_IDS)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    cfg = CliConfig(
        input_path=args.input,
        format=InputFormat(args.format) if args.format else None,
        chain_rule=args.chain_rule,
        lenient=args.lenient,
        output=OutputMode(args.output),
    )
    try:
        if args.command == "validate":
            return cmd_validate(cfg, out, err)
        if args.command == "lineage":
            return cmd_lineage(cfg, args.carrier, out, err)
        if args.command == "aggregates":
            return cmd_aggregates(cfg, out, err)
        if args.command == "canonical":
            return cmd_canonical(cfg, args.carrier, out, err)
        if args.command == "export":
            return cmd_export(cfg, out, err)
        if cfg.input_path is None and args.cq is None:
            raise _Usage("query needs an input graph")
        return cmd_query(cfg, args.query, args.cq, out, err)
    except _Usage as exc:
        print(f"tacio: {exc}", file=err)
        return USAGE
    except InvalidGraph as exc:
        _print_diagnostics(exc.diagnostics, err)
        print(f"tacio: {exc}", file=err)
        return FAILED
    except (_Failed, UnknownPrefix, TacioError) as exc:
        print(f"tacio: {exc}", file=err)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
