import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_graph
from tacio.competency import fixture_lines, load_fixture
from tacio.errors import Code
from tacio.ingest import SKIP, EventError, dump_log, load_log, parse_event
from tacio.model import Carrier, EncodingAct


def codes(diags):
    return [d.code for d in diags]


class TestParseEvent:
    def test_carrier(self):
        ev = parse_event('{"kind":"carrier","id":"c1","carrier_type":"Laptop","concretizer_type":"BinaryPattern"}', 1)
        assert ev.kind == "carrier" and isinstance(ev.record, Carrier)

    def test_unknown_kind(self):
        with pytest.raises(EventError) as exc:
            parse_event('{"kind":"widget"}', 3)
        assert exc.value.diagnostic.code is Code.UNKNOWN_KIND
        assert exc.value.diagnostic.line == 3

    def test_copy_needs_reference(self):
        with pytest.raises(EventError) as exc:
            parse_event('{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","output":"c2"}', 1)
        d = exc.value.diagnostic
        assert d.code is Code.MISSING_FIELD and "reference" in d.message

    def test_process_act_without_output(self):
        ev = parse_event('{"kind":"act","id":"p1","act_kind":"process","agent":"u1","inputs":["c1"]}', 1)
        assert isinstance(ev.record, EncodingAct) and ev.record.output is None

    @pytest.mark.parametrize("text", ["", "   ", "# a comment"])
    def test_skipped(self, text):
        assert parse_event(text, 1) is SKIP

    @pytest.mark.parametrize(
        "text, code",
        [
            ("{not json", Code.SYNTAX),
            ("[1, 2]", Code.SYNTAX),
            (b"\xff\xfe", Code.SYNTAX),
            ('{"kind":"content"}', Code.MISSING_FIELD),
            ('{"kind":"content","id":"has space"}', Code.INVALID_FIELD),
            ('{"kind":"carrier","id":"c1","carrier_type":"A","concretizer_type":"B","parts":"c2"}', Code.INVALID_FIELD),
            ('{"kind":"act","id":"a1","act_kind":"teleport","agent":"u","output":"c"}', Code.INVALID_FIELD),
            ('{"kind":"act","id":"a1","act_kind":["x"],"agent":"u","output":"c"}', Code.INVALID_FIELD),
            ('{"kind":"act","id":"a1","act_kind":"encoding","agent":"u","output":"c","ppf":"yes"}', Code.INVALID_FIELD),
            ('{"kind":"defeater","id":"d1","target":"a1","defeater_kind":"vague"}', Code.INVALID_FIELD),
            ('{"kind":"content","id":"i1","digest":42}', Code.INVALID_FIELD),
        ],
    )
    def test_bad_lines(self, text, code):
        with pytest.raises(EventError) as exc:
            parse_event(text, 1)
        assert exc.value.diagnostic.code is code

    def test_unknown_fields_kept_aside(self):
        ev = parse_event('{"kind":"content","id":"i1","colour":"red"}', 1)
        assert ev.extra == ("colour",)


class TestLoadLog:
    def test_email_fixture(self):
        lines = fixture_lines("cq1a_email")
        assert len(lines) == 12
        g, diags = load_log(lines)
        assert diags == [] and len(g.carriers) == 3

    def test_forward_reference(self):
        lines = [
            '{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","output":"c2","reference":"c1"}',
            '{"kind":"agent","id":"u1"}',
            '{"kind":"carrier","id":"c1","carrier_type":"Disk","concretizer_type":"BinaryPattern"}',
            '{"kind":"carrier","id":"c2","carrier_type":"Disk","concretizer_type":"BinaryPattern"}',
        ]
        g, diags = load_log(lines)
        assert diags == [] and g.atomic_producer("c2") == "a1"

    def test_duplicate_id_first_wins(self):
        lines = ['{"kind":"agent","id":"u%d"}' % i for i in range(6)]
        lines.append('{"kind":"content","id":"u2"}')
        g, diags = load_log(lines)
        assert [(d.line, d.code) for d in diags] == [(7, Code.DUPLICATE_ID)]
        assert "u2" in g.agents and "u2" not in g.contents

    def test_second_producer(self):
        lines = [
            '{"kind":"agent","id":"u1"}',
            '{"kind":"carrier","id":"c1","carrier_type":"D","concretizer_type":"B"}',
            '{"kind":"carrier","id":"c2","carrier_type":"D","concretizer_type":"B"}',
            '{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","output":"c2","reference":"c1"}',
            '{"kind":"act","id":"a2","act_kind":"encoding","agent":"u1","output":"c2"}',
        ]
        _, diags = load_log(lines)
        assert [(d.line, d.code) for d in diags] == [(5, Code.SECOND_PRODUCER)]

    def test_dangling_reference_gets_line(self):
        lines = [
            '{"kind":"agent","id":"u1"}',
            '{"kind":"act","id":"a1","act_kind":"encoding","agent":"u1","output":"ghost"}',
        ]
        _, diags = load_log(lines)
        assert [(d.line, d.code) for d in diags] == [(2, Code.DANGLING_REF)]

    def test_diagnostics_sorted(self):
        lines = ["{bad", '{"kind":"widget"}', "{bad"]
        _, diags = load_log(lines)
        assert [d.line for d in diags] == [1, 2, 3]


def test_dump_is_canonical(fixture_name):
    g = load_fixture(fixture_name)
    dumped = dump_log(g)
    again, diags = load_log(dumped)
    assert diags == [] and again == g
    assert dump_log(again) == dumped
    assert all(list(json.loads(l))[:2] == ["kind", "id"] for l in dumped)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_graph_round_trip(seed):
    g = random_graph(seed)
    again, diags = load_log(dump_log(g))
    assert diags == [] and again == g


@settings(max_examples=200, deadline=None)
@given(st.lists(st.binary(max_size=80), max_size=10))
def test_arbitrary_bytes_never_crash(lines):
    g, diags = load_log(lines)
    assert all(d.line >= 0 for d in diags)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.dictionaries(
    st.sampled_from(["kind", "id", "act_kind", "agent", "output", "reference", "target",
                     "carrier_type", "concretizer_type", "carries", "sub_acts", "ppf", "defeater_kind"]),
    st.one_of(st.none(), st.booleans(), st.integers(), st.text(max_size=6),
              st.sampled_from(["act", "carrier", "content", "copying", "c1", "u1", "rebutting"]),
              st.lists(st.sampled_from(["c1", "c2", "a1"]), max_size=3)),
), max_size=8))
def test_structured_junk_never_crashes(objs):
    load_log(json.dumps(o) for o in objs)


def test_shuffled_lines_same_graph(traffic):
    lines = fixture_lines("cq2a_traffic")
    rng = random.Random(7)
    for _ in range(5):
        rng.shuffle(lines)
        g, diags = load_log(lines)
        assert diags == [] and g == traffic
