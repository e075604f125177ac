"""Events, heartbeats, the total order O, and input-instance utilities."""
import heapq
import json
import logging
import os
from dataclasses import dataclass, replace

from dgsflow.errors import InvalidInput, UnsortedStream, Violation
from dgsflow.tags import ImplTag, Tag

logger = logging.getLogger(__name__)

MINUS_INFINITY = (-1, -1, -1)


@dataclass(frozen=True)
class Event:
    itag: ImplTag
    ts: int
    payload: object = ()
    seq: int = 0

    @classmethod
    def at(cls, tag, stream, ts, payload=(), seq=0):
        return cls(ImplTag(tag, stream), ts, payload, seq)

    @property
    def tag(self):
        return self.itag.tag

    @property
    def stream(self):
        return self.itag.stream

    @property
    def order(self):
        return (self.ts, self.itag.stream, self.seq)

    def __str__(self):
        return f'{self.itag.tag}@{self.ts}'


@dataclass(frozen=True)
class Heartbeat:
    """Progress marker; `tag=None` advances every itag of the stream."""

    stream: int
    ts: int
    tag: Tag = None
    seq: int = 0

    @property
    def itag(self):
        return ImplTag(self.tag, self.stream) if self.tag is not None else None

    @property
    def order(self):
        return (self.ts, self.stream, self.seq)

    def __str__(self):
        return f'hb[{self.tag or "*"}]@{self.stream}:{self.ts}'


def is_heartbeat(msg):
    return isinstance(msg, Heartbeat)


def _stream_of(msg):
    return msg.stream


def number_streams(streams):
    """Assign per-stream sequence numbers so every message has a distinct order key."""
    return [[replace(msg, seq=i) for i, msg in enumerate(stream)] for stream in streams]


def _check_monotone(stream_id, stream):
    previous = None
    for msg in stream:
        if previous is not None and msg.ts <= previous.ts:
            return msg, previous
        previous = msg
    return None


def sort_streams(streams):
    """Merge O-sorted streams into one event list, dropping heartbeats."""
    for stream_id, stream in enumerate(streams):
        bad = _check_monotone(stream_id, stream)
        if bad is not None:
            msg, previous = bad
            raise UnsortedStream(
                f'stream {stream_id} is not strictly increasing: ts {msg.ts} follows {previous.ts}',
                stream=stream_id,
            )
    merged = heapq.merge(*streams, key=lambda m: m.order)
    return [msg for msg in merged if not is_heartbeat(msg)]


def merge_messages(streams):
    """All messages (heartbeats included) in O order."""
    return list(heapq.merge(*streams, key=lambda m: m.order))


def validate_input_instance(streams):
    violations = []
    for stream_id, stream in enumerate(streams):
        for msg in stream:
            if _stream_of(msg) != stream_id:
                violations.append(Violation(
                    'stream_mismatch', f'message {msg} listed under stream {stream_id}', (stream_id,)))
                break
        bad = _check_monotone(stream_id, stream)
        if bad is not None:
            msg, previous = bad
            violations.append(Violation(
                'monotonicity',
                f'stream {stream_id}: ts {msg.ts} does not exceed previous ts {previous.ts}',
                (stream_id,),
            ))

    last = [stream[-1].order if stream else None for stream in streams]
    for i, stream in enumerate(streams):
        events = [m for m in stream if not is_heartbeat(m)]
        if not events:
            continue
        for j in range(len(streams)):
            if j == i:
                continue
            late = [x for x in events if last[j] is None or not x.order < last[j]]
            if late:
                violations.append(Violation(
                    'progress',
                    f'event {late[0]} on stream {i} has no later message on stream {j}'
                    + (f' ({len(late)} events affected)' if len(late) > 1 else ''),
                    (i, j),
                ))
    return violations


def inject_heartbeats(streams, period):
    """Add gap heartbeats every `period` ticks and a terminal heartbeat past every event."""
    if period < 1:
        raise InvalidInput(f'heartbeat period must be >= 1, got {period}')
    max_ts = max((m.ts for stream in streams for m in stream), default=0)
    terminal = max_ts + 1
    result = []
    for stream_id, stream in enumerate(streams):
        out = []
        previous_ts = None
        for msg in stream:
            if previous_ts is not None:
                tick = (previous_ts // period + 1) * period
                while tick < msg.ts:
                    out.append(Heartbeat(stream_id, tick))
                    tick += period
            out.append(msg)
            previous_ts = msg.ts
        if previous_ts is not None:
            tick = (previous_ts // period + 1) * period
            while tick < terminal:
                out.append(Heartbeat(stream_id, tick))
                tick += period
        out.append(Heartbeat(stream_id, terminal))
        result.append(out)
    logger.debug('injected heartbeats with period %d, terminal ts %d', period, terminal)
    return number_streams(result)


def stream_itags(streams):
    """Implementation tags observed on each stream."""
    return [sorted({m.itag for m in stream if not is_heartbeat(m)}) for stream in streams]


def _to_tuple(value):
    if isinstance(value, list):
        return tuple(_to_tuple(v) for v in value)
    if isinstance(value, dict):
        return {k: _to_tuple(v) for k, v in value.items()}
    return value


def message_to_dict(msg):
    if is_heartbeat(msg):
        return {'stream': msg.stream, 'tag': str(msg.tag) if msg.tag else None, 'ts': msg.ts, 'payload': None}
    return {'stream': msg.stream, 'tag': str(msg.tag), 'ts': msg.ts, 'payload': msg.payload}


def message_from_dict(data):
    stream = int(data['stream'])
    ts = int(data['ts'])
    tag = data.get('tag')
    payload = data.get('payload')
    if payload is None:
        return Heartbeat(stream, ts, Tag.parse(tag) if tag else None)
    if not tag:
        raise InvalidInput(f'event on stream {stream} at ts {ts} has no tag')
    return Event.at(Tag.parse(tag), stream, ts, _to_tuple(payload))


def write_trace(path, streams):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        for msg in merge_messages(streams):
            handle.write(json.dumps(message_to_dict(msg), sort_keys=True) + '\n')


def read_trace(path):
    per_stream = {}
    with open(path, encoding='utf-8') as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                msg = message_from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as e:
                raise InvalidInput(f'{path}:{lineno}: malformed trace line ({e})', line=lineno)
            if msg.stream < 0:
                raise InvalidInput(f'{path}:{lineno}: negative stream id', line=lineno)
            per_stream.setdefault(msg.stream, []).append(msg)
    count = max(per_stream, default=-1) + 1
    return number_streams([per_stream.get(i, []) for i in range(count)])
