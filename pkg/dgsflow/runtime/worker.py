"""Worker protocol: mailbox releases drive updates, and internal workers join, update and fork."""
import logging
import time
from collections import deque
from dataclasses import dataclass, field

from dgsflow.encoding import to_jsonable
from dgsflow.errors import ProtocolViolation
from dgsflow.plan import subtree_tags
from dgsflow.runtime.mailbox import Mailbox

logger = logging.getLogger(__name__)

ROUTER = 'router'

IDLE = 'idle'
AWAIT_JOIN = 'await_join'
AWAIT_FORK = 'await_fork'


@dataclass(frozen=True)
class RoutedEvent:
    event: object
    ingest: float = None


@dataclass(frozen=True)
class RoutedHeartbeat:
    heartbeat: object


@dataclass(frozen=True)
class EndOfInput:
    pass


@dataclass(frozen=True)
class JoinRequest:
    order: tuple


@dataclass(frozen=True)
class JoinResponse:
    sender: str
    state: object


@dataclass(frozen=True)
class ForkResponse:
    state: object


@dataclass(frozen=True)
class CheckpointRecord:
    worker: str
    o_value: tuple
    state: object

    def to_dict(self):
        return {'worker': self.worker, 'o_value': list(self.o_value), 'state': to_jsonable(self.state)}


@dataclass
class WorkerStats:
    events: int = 0
    joins: int = 0
    forks: int = 0
    join_requests: int = 0

    def to_dict(self):
        return {'events': self.events, 'joins': self.joins, 'forks': self.forks,
                'join_requests': self.join_requests}


@dataclass
class WorkerResult:
    """Everything a worker hands back to the harness once it has finished."""

    worker: str
    outputs: list = field(default_factory=list)
    stats: WorkerStats = field(default_factory=WorkerStats)
    checkpoints: list = field(default_factory=list)
    latencies: list = field(default_factory=list)
    release_violations: list = field(default_factory=list)


class Worker:
    def __init__(self, node, program, plan, state=None, checkpoint_pred=None):
        self.node = node
        self.id = node.id
        self.program = program
        self.parent = plan.parent(node.id)
        self.children = tuple(c.id for c in node.children)
        self.child_preds = tuple(subtree_tags(c) for c in node.children)
        ancestor_itags = frozenset(i for a in plan.ancestors(node.id) for i in plan.worker(a).itags)
        self.mailbox = Mailbox(node.itags, ancestor_itags, program.rel, ordered=bool(node.children))
        if node.children:
            self.fork = program.fork(node.fork)
            self.join = program.join(node.join)
        self.state = state
        self.phase = IDLE
        self.context = None
        self.responses = {}
        self.ready = deque()
        self.end_of_input = False
        self.checkpoint_pred = checkpoint_pred if self.parent is None else None
        self.result = WorkerResult(node.id)

    @property
    def is_leaf(self):
        return not self.children

    @property
    def blocked(self):
        return self.phase != IDLE

    @property
    def can_step(self):
        return self.phase == IDLE and bool(self.ready)

    @property
    def complete(self):
        return self.end_of_input and self.mailbox.empty and not self.blocked and not self.ready

    def receive(self, sender, msg):
        """Accept one message; returns outgoing (destination, message) pairs."""
        if isinstance(msg, RoutedEvent):
            self.ready.extend(self.mailbox.insert_event(msg.event, msg.ingest))
        elif isinstance(msg, RoutedHeartbeat):
            self.ready.extend(self.mailbox.insert_heartbeat(msg.heartbeat))
        elif isinstance(msg, JoinRequest):
            if sender != self.parent:
                raise ProtocolViolation(f'{self.id} got a join request from {sender}', worker=self.id)
            self.ready.extend(self.mailbox.insert_join_request(msg.order))
        elif isinstance(msg, JoinResponse):
            return self._on_join_response(msg)
        elif isinstance(msg, ForkResponse):
            return self._on_fork_response(sender, msg)
        elif isinstance(msg, EndOfInput):
            self.end_of_input = True
        else:
            raise ProtocolViolation(f'{self.id} cannot handle {type(msg).__name__}', worker=self.id)
        return []

    def step(self):
        """Process the next released entry; returns outgoing (destination, message) pairs."""
        if not self.can_step:
            return []
        entry = self.ready.popleft()
        if entry.is_placeholder:
            self.result.stats.join_requests += 1
            if self.is_leaf:
                state, self.state = self.state, None
                self.phase = AWAIT_FORK
                return [(self.parent, JoinResponse(self.id, state))]
            return self._request_joins(('up', entry))
        self.result.stats.events += 1
        if self.is_leaf:
            self.state = self._apply(self.state, entry)
            return []
        return self._request_joins(('own', entry))

    def _request_joins(self, context):
        self.phase = AWAIT_JOIN
        self.context = context
        self.responses = {}
        order = context[1].order
        return [(child, JoinRequest(order)) for child in self.children]

    def _apply(self, state, entry):
        state, outputs = self.program.step(self.node.state_type, state, entry.event)
        if outputs:
            now = time.monotonic()
            for out in outputs:
                self.result.outputs.append((out, entry.order))
                if entry.ingest is not None:
                    self.result.latencies.append(now - entry.ingest)
        return state

    def _on_join_response(self, msg):
        if self.phase != AWAIT_JOIN or msg.sender not in self.children or msg.sender in self.responses:
            raise ProtocolViolation(f'{self.id} got an unexpected join response from {msg.sender}',
                                    worker=self.id)
        self.responses[msg.sender] = msg.state
        if len(self.responses) < len(self.children):
            return []
        joined = self.join(*(self.responses[c] for c in self.children))
        self.responses = {}
        self.result.stats.joins += 1
        kind, entry = self.context
        if kind == 'up':
            self.phase = AWAIT_FORK
            return [(self.parent, JoinResponse(self.id, joined))]
        if self.checkpoint_pred is not None and self.checkpoint_pred(entry.event):
            self.result.checkpoints.append(CheckpointRecord(
                self.id, entry.order, self.program.canonical(self.node.state_type, joined)))
        state = self._apply(joined, entry)
        return self._fork_down(state)

    def _fork_down(self, state):
        left, right = self.fork(state, *self.child_preds)
        self.result.stats.forks += 1
        self.phase = IDLE
        self.context = None
        return [(self.children[0], ForkResponse(left)), (self.children[1], ForkResponse(right))]

    def _on_fork_response(self, sender, msg):
        if self.phase != AWAIT_FORK or sender != self.parent:
            raise ProtocolViolation(f'{self.id} got an unexpected fork response from {sender}', worker=self.id)
        if self.is_leaf:
            self.state = msg.state
            self.phase = IDLE
            return []
        return self._fork_down(msg.state)

    def finish(self):
        self.result.release_violations = self.mailbox.check_log()
        return self.result

    def describe(self):
        """Diagnostic snapshot used in deadlock reports."""
        return {
            'worker': self.id,
            'phase': self.phase,
            'ready': len(self.ready),
            'end_of_input': self.end_of_input,
            'buffered': [f'{e.itag}@{list(e.order)}' + (' (join)' if e.is_placeholder else '')
                         for e in sorted(self.mailbox.pending(), key=lambda e: e.order)][:20],
            'awaiting_requests': sorted(list(o) for o in self.mailbox.requests),
        }


def initial_states(program, plan):
    """Leaf states obtained by forking init down every tree."""
    states = {}

    def descend(node, state):
        if node.is_leaf:
            states[node.id] = state
            return
        fork = program.fork(node.fork)
        left, right = fork(state, *(subtree_tags(c) for c in node.children))
        descend(node.children[0], left)
        descend(node.children[1], right)

    for root in plan.roots:
        descend(root, program.init_state())
    return states
