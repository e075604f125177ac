"""Selective-reordering mailbox.

A worker's mailbox keeps an O-sorted buffer and a timer per relevant itag (the
worker's own itags plus those owned by its ancestors). An entry is released
once every dependent itag has (a) a timer at or past the entry and (b) no
buffered entry before it. Ancestor events are buffered as placeholders that
stand for the join request the parent will send for them; ancestor itags are
dependent on every relevant itag, so a placeholder blocks everything after it.
"""
import logging
from collections import deque
from dataclasses import dataclass

from dgsflow.errors import StaleMessage, Violation
from dgsflow.streams import MINUS_INFINITY, is_heartbeat

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Entry:
    """A buffered event, or a placeholder for an ancestor's join request when `event` is None."""

    order: tuple
    itag: object
    event: object = None
    ingest: float = None

    @property
    def is_placeholder(self):
        return self.event is None


class Mailbox:
    def __init__(self, own, ancestor, rel, ordered=False):
        self.own = frozenset(own)
        self.ancestor = frozenset(ancestor)
        self.relevant = self.own | self.ancestor
        self.rel = rel
        # Internal workers release their own itags in O order so the join
        # requests they send down arrive in the order children release them.
        self.ordered = ordered
        self.buffers = {i: deque() for i in self.relevant}
        self.timers = {i: MINUS_INFINITY for i in self.relevant}
        self.by_stream = {}
        for itag in sorted(self.relevant):
            self.by_stream.setdefault(itag.stream, []).append(itag)
        self.dependents = {i: frozenset(j for j in self.relevant if j != i and self.depends(i, j))
                           for i in self.relevant}
        self.requests = set()
        self.delivered = []
        self.log = []

    def depends(self, x, y):
        if x in self.ancestor or y in self.ancestor or self.ordered:
            return True
        return self.rel.itags_depend(x, y)

    def _advance(self, stream, order):
        changed = []
        for itag in self.by_stream.get(stream, ()):
            if order > self.timers[itag]:
                self.timers[itag] = order
                changed.append(itag)
        return changed

    def _check_fresh(self, itag, order):
        if order <= self.timers[itag]:
            raise StaleMessage(f'{itag} message at {order} is not after timer {self.timers[itag]}',
                               itag=str(itag), order=list(order))

    def insert(self, msg, ingest=None):
        if is_heartbeat(msg):
            return self.insert_heartbeat(msg)
        return self.insert_event(msg, ingest)

    def insert_event(self, event, ingest=None):
        itag = event.itag
        if itag not in self.relevant:
            raise StaleMessage(f'{itag} is not relevant to this mailbox', itag=str(itag))
        self._check_fresh(itag, event.order)
        if itag in self.own:
            entry = Entry(event.order, itag, event, ingest)
        else:
            entry = Entry(event.order, itag)
        self.buffers[itag].append(entry)
        self.delivered.append((itag, event.order))
        changed = self._advance(itag.stream, event.order)
        return self._release({itag, *changed})

    def insert_heartbeat(self, heartbeat):
        itags = self.by_stream.get(heartbeat.stream, ())
        if heartbeat.itag is not None and heartbeat.itag in self.relevant:
            self._check_fresh(heartbeat.itag, heartbeat.order)
        changed = self._advance(heartbeat.stream, heartbeat.order)
        if not itags:
            return []
        return self._release(set(changed))

    def insert_join_request(self, order):
        self.requests.add(order)
        return self._release(set(self.ancestor))

    def _head(self, itag):
        buffer = self.buffers[itag]
        return buffer[0] if buffer else None

    def releasable(self, itag):
        head = self._head(itag)
        if head is None:
            return False
        if head.is_placeholder and head.order not in self.requests:
            return False
        for other in self.dependents[itag]:
            if self.timers[other] < head.order:
                return False
            other_head = self._head(other)
            if other_head is not None and not head.order < other_head.order:
                return False
        return True

    def _release(self, seeds):
        workset = {i for s in seeds for i in (s, *self.dependents[s])}
        released = []
        while True:
            candidates = [i for i in workset if self.releasable(i)]
            if not candidates:
                return released
            itag = min(candidates, key=lambda i: self.buffers[i][0].order)
            entry = self.buffers[itag].popleft()
            if entry.is_placeholder:
                self.requests.discard(entry.order)
            self.log.append((itag, entry.order))
            released.append(entry)
            workset |= self.dependents[itag]
            workset.add(itag)

    @property
    def empty(self):
        return not any(self.buffers.values())

    def pending(self):
        return [e for buffer in self.buffers.values() for e in buffer]

    def check_log(self):
        return check_release_log(self.log, self.delivered, self.depends)


def check_release_log(log, delivered, depends):
    """Violations of dependent-order preservation in a release log.

    `log` and `delivered` are lists of (itag, order); `depends(x, y)` decides dependence.
    """
    violations = []
    if sorted(log) != sorted(delivered):
        violations.append(Violation('reordering', 'released entries are not a permutation of delivered ones'))
    latest = {}
    for itag, order in log:
        for other, seen in latest.items():
            if seen > order and depends(itag, other):
                violations.append(Violation(
                    'dependent_order', f'{itag}@{order} released after dependent {other}@{seen}', (itag, other)))
        if order > latest.get(itag, MINUS_INFINITY):
            latest[itag] = order
    return violations
