"""Synthetic input instances: k parallel streams plus one stream of synchronizing events.

At tick t = 1..events_per_stream every parallel stream emits one event at ts 2t;
the synchronizing stream (index k) emits at ts 2t + 1 whenever t is a multiple of
sync_ratio. Heartbeats are injected afterwards.
"""
import logging
import random

from dgsflow.apps import fraud, key_counter, page_view, value_barrier
from dgsflow.errors import ConfigError
from dgsflow.streams import Event, inject_heartbeats
from dgsflow.tags import Tag

logger = logging.getLogger(__name__)


def _barrier_streams(k, ticks, ratio, rng):
    streams = [[Event.at(Tag.of('a', i), i, 2 * t, value_barrier.value_payload(rng)) for t in range(1, ticks + 1)]
               for i in range(k)]
    streams.append([Event.at(value_barrier.BARRIER, k, 2 * t + 1, ()) for t in range(1, ticks + 1)
                    if t % ratio == 0])
    return streams


def _key_counter_streams(k, ticks, ratio, rng, keys=key_counter.DEFAULT_KEYS):
    streams = [[Event.at(Tag.of('i', rng.choice(keys)), i, 2 * t, ()) for t in range(1, ticks + 1)]
               for i in range(k)]
    resets = []
    for t in range(1, ticks + 1):
        if t % ratio == 0:
            key = keys[(t // ratio - 1) % len(keys)]
            resets.append(Event.at(Tag.of('r', key), k, 2 * t + 1, ()))
    streams.append(resets)
    return streams


def _page_view_streams(k, ticks, ratio, rng, uids=page_view.DEFAULT_UIDS):
    streams = []
    for i in range(k):
        stream = []
        for t in range(1, ticks + 1):
            kind = page_view.GET if rng.randrange(page_view.GET_RATIO) == 0 else page_view.VIEW
            stream.append(Event.at(Tag.of(kind, rng.choice(uids)), i, 2 * t, ()))
        streams.append(stream)
    updates = []
    for t in range(1, ticks + 1):
        if t % ratio == 0:
            uid = uids[(t // ratio - 1) % len(uids)]
            updates.append(Event.at(Tag.of(page_view.UPDATE, uid), k, 2 * t + 1, page_view.zipcode_payload(rng)))
    streams.append(updates)
    return streams


_BUILDERS = {
    key_counter.NAME: _key_counter_streams,
    value_barrier.NAME: _barrier_streams,
    fraud.NAME: _barrier_streams,
    page_view.NAME: _page_view_streams,
}


def generate_input(app, config):
    """Valid input instance for `app`; deterministic in config.seed."""
    if app not in _BUILDERS:
        raise ConfigError(f'unknown app {app!r}', app=app)
    if config.streams < 1:
        raise ConfigError('streams must be >= 1', field='streams')
    rng = random.Random(config.seed)
    streams = _BUILDERS[app](config.streams, config.events_per_stream, config.sync_ratio, rng)
    logger.debug('generated %s input: %d streams, %d events', app, len(streams), sum(len(s) for s in streams))
    return inject_heartbeats(streams, config.heartbeat_period)
