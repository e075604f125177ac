import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import events, i, r
from dgsflow.apps import key_counter
from dgsflow.errors import InvalidInput, UnknownTag, UnsortedStream
from dgsflow.streams import (Event, Heartbeat, inject_heartbeats, merge_messages, number_streams, read_trace,
                             sort_streams, validate_input_instance, write_trace)
from dgsflow.tags import (DependenceRelation, ImplTag, Tag, indep_preds, predicate, satisfies,
                          validate_dependence)


def test_tag_printing_and_parsing():
    assert str(i(1)) == 'i(1)'
    assert str(Tag.of('b')) == 'b'
    assert Tag.parse('page_view(3)') == Tag.of('page_view', 3)
    assert Tag.parse(' b ') == Tag.of('b')
    assert str(ImplTag(r(2), 4)) == 'r(2)@4'
    assert ImplTag.from_dict(ImplTag(r(2), 4).to_dict()) == ImplTag(r(2), 4)
    with pytest.raises(UnknownTag):
        Tag.parse('1bad(')


def test_predicates():
    pred = predicate(i(1), r(1))
    assert satisfies(pred, i(1))
    assert not satisfies(pred, i(2))


def test_counter_relation_is_symmetric():
    rel = key_counter.dependence()
    assert validate_dependence(rel, key_counter.tag_alphabet()) == []
    assert rel.depends(r(1), r(1))
    assert rel.depends(r(1), i(1)) and rel.depends(i(1), r(1))
    assert rel.indep(i(1), i(1))
    assert rel.indep(r(1), i(2))


def test_empty_relation_is_valid():
    assert validate_dependence(DependenceRelation(), frozenset({i(1), r(1)})) == []


def test_asymmetric_relation_is_reported():
    a, b = Tag.of('a'), Tag.of('b')
    violations = validate_dependence(DependenceRelation(frozenset({(a, b)})), frozenset({a, b}))
    assert [v.kind for v in violations] == ['asymmetric']
    assert violations[0].subject == (a, b)


def test_unknown_tags_in_relation_are_reported():
    a, z = Tag.of('a'), Tag.of('z')
    violations = validate_dependence(DependenceRelation.symmetric({(a, z)}), frozenset({a}))
    assert {v.kind for v in violations} == {'unknown_tag'}


def test_indep_preds():
    rel = key_counter.dependence(keys=(1, 2, 3))
    assert indep_preds({i(3)}, {i(3)}, rel)
    assert not indep_preds({r(1)}, {i(1)}, rel)
    assert indep_preds(set(), {r(1), i(1)}, rel)
    assert indep_preds({r(1), i(1)}, {r(2), i(2)}, rel)


def test_sort_streams_merges_and_drops_heartbeats():
    a, b = Tag.of('a'), Tag.of('b')
    first = [Event.at(a, 0, 1), Event.at(a, 0, 3)]
    second = [Event.at(b, 1, 2)]
    assert [(e.tag, e.ts) for e in sort_streams([first, second])] == [(a, 1), (b, 2), (a, 3)]
    assert sort_streams([[Heartbeat(0, 1), Heartbeat(0, 2)]]) == []


def test_sort_streams_keeps_single_stream_order():
    stream = events(i(1), i(2), r(1), i(2), r(1))
    assert sort_streams([stream]) == stream


def test_sort_streams_rejects_unsorted_input():
    with pytest.raises(UnsortedStream):
        sort_streams([[Event.at(i(1), 0, 5), Event.at(i(1), 0, 5)]])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(min_value=0, max_value=200), max_size=40, unique=True), min_size=1,
                max_size=4))
def test_sort_streams_matches_flatten_and_sort(timestamps):
    streams = number_streams([[Event.at(i(1), s, ts) for ts in sorted(tss)] for s, tss in enumerate(timestamps)])
    merged = sort_streams(streams)
    assert merged == sorted((e for stream in streams for e in stream), key=lambda e: e.order)


def test_validate_input_with_terminal_heartbeats():
    streams = inject_heartbeats([[Event.at(i(1), 0, 1)], [Event.at(r(1), 1, 2)]], period=100)
    assert validate_input_instance(streams) == []


def test_validate_input_reports_non_strict_timestamps():
    streams = [[Event.at(i(1), 0, 5), Event.at(i(1), 0, 5, seq=1), Heartbeat(0, 9, seq=2)]]
    assert 'monotonicity' in {v.kind for v in validate_input_instance(streams)}


def test_validate_input_reports_missing_progress():
    streams = [[Event.at(i(1), 0, 10)], [Event.at(r(1), 1, 3), Heartbeat(1, 7, seq=1)]]
    violations = validate_input_instance(streams)
    assert [(v.kind, v.subject) for v in violations if v.kind == 'progress'][0] == ('progress', (0, 1))


def brute_force_progress(streams):
    """Every event must be followed by some message on every other stream."""
    bad = set()
    for a, stream in enumerate(streams):
        for x in stream:
            if isinstance(x, Heartbeat):
                continue
            for b, other in enumerate(streams):
                if b != a and not any(x.order < y.order for y in other):
                    bad.add((a, b))
    return bad


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(min_value=1, max_value=50), max_size=6, unique=True), min_size=2,
                max_size=3))
def test_progress_check_matches_exhaustive_scan(timestamps):
    streams = number_streams([[Event.at(i(1), s, ts) for ts in sorted(tss)] for s, tss in enumerate(timestamps)])
    found = {v.subject for v in validate_input_instance(streams) if v.kind == 'progress'}
    assert found == brute_force_progress(streams)


def test_inject_heartbeats_on_empty_stream():
    assert inject_heartbeats([[]], period=5) == [[Heartbeat(0, 1)]]


def test_inject_heartbeats_fills_gaps():
    streams = inject_heartbeats([[Event.at(i(1), 0, 10), Event.at(i(1), 0, 30)]], period=10)
    beats = [m.ts for m in streams[0] if isinstance(m, Heartbeat)]
    assert beats == [20, 31]
    assert [m.seq for m in streams[0]] == [0, 1, 2, 3]


def test_inject_heartbeats_with_long_period_adds_only_terminal():
    streams = inject_heartbeats([[Event.at(i(1), 0, 10), Event.at(i(1), 0, 30)]], period=1000)
    assert [m.ts for m in streams[0] if isinstance(m, Heartbeat)] == [31]


def test_inject_heartbeats_rejects_bad_period():
    with pytest.raises(InvalidInput):
        inject_heartbeats([[]], period=0)


def test_heartbeat_itags():
    assert Heartbeat(2, 5).itag is None
    assert Heartbeat(2, 5, r(1)).itag == ImplTag(r(1), 2)


def test_trace_files_preserve_messages(tmp_path):
    rng = random.Random(3)
    streams = inject_heartbeats(
        [[Event.at(Tag.of('a', 0), 0, 2 * t, rng.randrange(100)) for t in range(1, 20)],
         [Event.at(Tag.of('b'), 1, 7, ())]], period=5)
    path = str(tmp_path / 'trace.jsonl')
    write_trace(path, streams)
    assert read_trace(path) == streams
    assert merge_messages(read_trace(path)) == merge_messages(streams)


def test_read_trace_reports_malformed_lines(tmp_path):
    path = tmp_path / 'bad.jsonl'
    path.write_text('{"stream": 0, "tag": "a", "ts": 1, "payload": 3}\nnot json\n')
    with pytest.raises(InvalidInput) as excinfo:
        read_trace(str(path))
    assert excinfo.value.details['line'] == 2
