import pytest

from conftest import events, i, r
from dgsflow.apps import APPS, app_names, fraud, get_app, key_counter, page_view, value_barrier
from dgsflow.apps.generators import generate_input
from dgsflow.config import RunConfig
from dgsflow.errors import ConfigError
from dgsflow.program import sequential_spec
from dgsflow.streams import Event, is_heartbeat, validate_input_instance
from dgsflow.tags import Tag


def values(p, stream):
    return [o.value for o in sequential_spec(p, stream)]


def a(k, ts, v):
    return Event.at(Tag.of('a', k), k, ts, v)


def b(ts, stream=2):
    return Event.at(value_barrier.BARRIER, stream, ts, ())


def test_registry():
    assert app_names() == ['fraud', 'key-counter', 'page-view', 'value-barrier']
    assert get_app('fraud') is fraud
    with pytest.raises(ConfigError):
        get_app('word-count')


def test_counter_without_reads_outputs_nothing(counter):
    assert values(counter, events(i(1), i(2), i(1))) == []


def test_counter_fork_follows_the_read_tag():
    assert key_counter.fork({1: 5}, frozenset({r(1)}), frozenset({r(2)})) == ({1: 5}, {})
    assert key_counter.fork({1: 5, 2: 1}, frozenset({i(1)}), frozenset()) == ({}, {1: 5, 2: 1})
    assert key_counter.join({1: 2}, {1: 3, 2: 1}) == {1: 5, 2: 1}


def test_counter_itags():
    itags = key_counter.itags_for(2)
    assert [str(x) for x in itags] == ['i(1)@0', 'i(2)@0', 'i(1)@1', 'i(2)@1', 'r(1)@2', 'r(2)@2']


def test_barrier_windows(barrier):
    assert values(barrier, [a(0, 1, 1), a(1, 2, 2), a(0, 3, 3), b(4)]) == [6]
    assert values(barrier, [b(1)]) == [0]
    assert values(barrier, [a(0, 1, 1), b(2), a(1, 3, 2), b(4)]) == [1, 2]


def test_barrier_relation(barrier):
    assert barrier.rel.depends(Tag.of('a', 0), value_barrier.BARRIER)
    assert barrier.rel.depends(value_barrier.BARRIER, value_barrier.BARRIER)
    assert barrier.rel.indep(Tag.of('a', 0), Tag.of('a', 1))


def test_page_view_reads_latest_zipcode(views):
    update = Event.at(Tag.of(page_view.UPDATE, 1), 2, 1, 7)
    view = Event.at(Tag.of(page_view.VIEW, 1), 0, 2, ())
    lookup = Event.at(Tag.of(page_view.GET, 2), 1, 3, ())
    assert values(views, [update, view, lookup]) == [
        ('update', 1, 7), (page_view.VIEW, 1, 7), (page_view.GET, 2, page_view.NO_ZIPCODE)]


def test_page_view_relation(views):
    assert views.rel.depends(Tag.of(page_view.VIEW, 1), Tag.of(page_view.UPDATE, 1))
    assert views.rel.depends(Tag.of(page_view.UPDATE, 1), Tag.of(page_view.UPDATE, 1))
    assert views.rel.indep(Tag.of(page_view.VIEW, 1), Tag.of(page_view.VIEW, 1))
    assert views.rel.indep(Tag.of(page_view.UPDATE, 1), Tag.of(page_view.UPDATE, 2))


def test_page_view_fork_and_join():
    state = {1: 10000, 2: 20000}
    uid1 = frozenset(page_view.uid_tags(1))
    views_of_2 = frozenset({Tag.of(page_view.VIEW, 2)})
    left, right = page_view.fork(state, uid1, views_of_2)
    assert (left, right) == ({1: 10000}, {2: 20000})
    assert set(left).isdisjoint(right)
    assert {**left, **right} == state
    # users neither leg touches stay on the left; read-only users are copied to both legs
    assert page_view.fork(state, uid1, frozenset()) == (state, {})
    views_of_1 = frozenset({Tag.of(page_view.VIEW, 1)})
    assert page_view.fork(state, views_of_1, views_of_1) == (state, {1: 10000})
    assert page_view.join({1: 5}, {1: 6, 2: 7}) == {1: 5, 2: 7}


def test_fraud_flags_transactions(fraud_program):
    assert values(fraud_program, [a(0, 1, 2000)]) == [('flagged', 2000)]
    assert values(fraud_program, [b(4), a(0, 6, 5), a(1, 7, 6)]) == [('sum', 0), ('flagged', 5)]
    assert values(fraud_program, [a(0, 1, 3), a(1, 2, 4), b(3)]) == [('sum', 7)]


def test_fraud_join_keeps_left_rule():
    assert fraud.join(fraud.FraudState(3, 9), fraud.FraudState(4, 9)) == fraud.FraudState(7, 9)


@pytest.mark.parametrize('app', sorted(APPS))
def test_generated_inputs_are_valid(app):
    config = RunConfig(app=app, streams=2, events_per_stream=10, sync_ratio=5, heartbeat_period=3, seed=1)
    streams = generate_input(app, config)
    assert len(streams) == 3
    assert validate_input_instance(streams) == []
    sync = [m for m in streams[2] if not is_heartbeat(m)]
    assert len(sync) == 2
    assert all(len([m for m in s if not is_heartbeat(m)]) == 10 for s in streams[:2])
    assert generate_input(app, config) == streams


def test_generated_page_views_hit_two_users():
    config = RunConfig(app=page_view.NAME, streams=3, events_per_stream=200, sync_ratio=50, seed=2)
    streams = generate_input(page_view.NAME, config)
    uids = {m.tag.key[0] for s in streams for m in s if not is_heartbeat(m)}
    assert uids == set(page_view.DEFAULT_UIDS)


def test_generator_rejects_unknown_apps():
    with pytest.raises(ConfigError):
        generate_input('word-count', RunConfig())
