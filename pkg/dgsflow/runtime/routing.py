"""Delivery sets for input messages."""
from functools import lru_cache

from dgsflow.plan import routing_targets
from dgsflow.streams import Heartbeat, is_heartbeat


def stream_targets(plan, stream):
    """Workers whose mailbox tracks at least one itag of `stream`."""
    targets = set()
    for itag in plan.owned_itags():
        if itag.stream == stream:
            targets |= routing_targets(plan, itag)
    return frozenset(targets)


def route(plan, msg):
    """Workers that must see `msg`: the owner of its itag and all of the owner's descendants.

    Stream-level heartbeats go to every worker tracking an itag of their stream.
    """
    if is_heartbeat(msg) and (msg.itag is None or msg.itag not in plan.owned_itags()):
        return stream_targets(plan, msg.stream)
    return routing_targets(plan, msg.itag)


def progress_targets(plan, msg):
    """Workers tracking `msg`'s stream that do not receive the event itself."""
    if is_heartbeat(msg):
        return frozenset()
    return stream_targets(plan, msg.stream) - route(plan, msg)


def progress_notice(event):
    """Stream-level heartbeat at the event's order key."""
    return Heartbeat(event.stream, event.ts, None, event.seq)


class Router:
    """Memoised routing for one plan."""

    def __init__(self, plan):
        self.plan = plan
        self._owned = plan.owned_itags()
        self._itag_targets = lru_cache(maxsize=None)(lambda itag: routing_targets(plan, itag))
        self._stream_targets = lru_cache(maxsize=None)(lambda stream: stream_targets(plan, stream))

    def targets(self, msg):
        if is_heartbeat(msg) and (msg.itag is None or msg.itag not in self._owned):
            return self._stream_targets(msg.stream)
        return self._itag_targets(msg.itag)

    def deliveries(self, msg):
        """(worker, message) pairs for one input message, in worker id order.

        Workers that track the stream but not the event's itag get a progress
        notice so their timers for that stream still advance.
        """
        targets = self.targets(msg)
        sends = [(t, msg) for t in targets]
        if not is_heartbeat(msg):
            notice = progress_notice(msg)
            sends.extend((t, notice) for t in self._stream_targets(msg.stream) - targets)
        return sorted(sends, key=lambda send: send[0])
