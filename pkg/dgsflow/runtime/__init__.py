"""Plan execution: pre-checks, worker setup, the two execution modes, and result aggregation."""
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

from dgsflow.errors import ConfigError, InvalidInput, InvalidPlan, InvalidProgram, UnknownTag
from dgsflow.plan import validate_plan
from dgsflow.runtime.concurrent import BACKENDS
from dgsflow.runtime.mailbox import Mailbox, check_release_log
from dgsflow.runtime.routing import route
from dgsflow.runtime.simulated import run_simulated
from dgsflow.runtime.worker import CheckpointRecord, Worker, initial_states
from dgsflow.streams import is_heartbeat, validate_input_instance

logger = logging.getLogger(__name__)

__all__ = [
    'CheckpointRecord', 'Mailbox', 'RunResult', 'RunStats', 'check_release_log', 'every_nth',
    'output_counter', 'route', 'run_plan',
]


def _percentile(values, q):
    if not values:
        return None
    ordered = sorted(values)
    return ordered[min(len(ordered) - 1, int(q * len(ordered)))]


@dataclass
class RunStats:
    mode: str
    workers: dict = field(default_factory=dict)
    events: int = 0
    outputs: int = 0
    wall_time: float = 0.0
    latency: dict = field(default_factory=dict)
    release_violations: list = field(default_factory=list)
    leaves: tuple = ()
    root_ids: tuple = ()
    depth: int = 0

    @property
    def throughput(self):
        return self.events / self.wall_time if self.wall_time > 0 else 0.0

    @property
    def root_joins(self):
        return sum(self.workers[r].joins for r in self.root_ids)

    @property
    def leaf_events(self):
        return sum(self.workers[w].events for w in self.leaves)

    @property
    def non_leaf_events(self):
        return self.events - self.leaf_events

    def to_dict(self):
        return {
            'mode': self.mode,
            'events': self.events,
            'outputs': self.outputs,
            'wall_time': self.wall_time,
            'throughput': self.throughput,
            'latency': self.latency,
            'root_joins': self.root_joins,
            'leaf_events': self.leaf_events,
            'non_leaf_events': self.non_leaf_events,
            'depth': self.depth,
            'workers': {wid: s.to_dict() for wid, s in sorted(self.workers.items())},
            'release_violations': [v.to_dict() for v in self.release_violations],
        }


class RunResult(NamedTuple):
    outputs: list
    stats: RunStats
    checkpoints: list


def output_counter(outputs):
    """Outputs as a multiset keyed on (value, ts)."""
    return Counter((repr(o.value), o.ts) for o in outputs)


def every_nth(n):
    """Checkpoint predicate that fires on every n-th root join."""
    seen = [0]

    def pred(event):
        seen[0] += 1
        return seen[0] % n == 0
    return pred


def precheck(p, plan, streams):
    violations = p.validate()
    if violations:
        raise InvalidProgram(f'program {p.name} is not well formed', violations=violations)
    for stream in streams:
        for msg in stream:
            if not is_heartbeat(msg) and msg.tag not in p.alphabet:
                raise UnknownTag(f'event tag {msg.tag} is not in the alphabet of {p.name}', tag=str(msg.tag))
    violations = validate_input_instance(streams)
    if violations:
        raise InvalidInput('input instance is not valid', violations=violations)
    required = {m.itag for stream in streams for m in stream if not is_heartbeat(m)}
    violations = validate_plan(p, plan, required | plan.owned_itags())
    if violations:
        raise InvalidPlan('synchronization plan is not valid for this program', violations=violations)


def run_plan(p, plan, streams, mode='simulated', seed=0, checkpoint_pred=None,
             backend='thread', idle_timeout=30.0):
    """Execute `plan` over `streams`; returns (outputs, stats, checkpoints)."""
    precheck(p, plan, streams)
    states = initial_states(p, plan)
    workers = {
        node.id: Worker(node, p, plan, state=states.get(node.id), checkpoint_pred=checkpoint_pred)
        for node in plan.workers()
    }
    started = time.perf_counter()
    if mode == 'simulated':
        results = run_simulated(workers, plan, streams, seed)
    elif mode == 'concurrent':
        if backend not in BACKENDS:
            raise ConfigError(f'unknown backend {backend}', field='backend')
        results = BACKENDS[backend](workers, plan, streams, idle_timeout)
    else:
        raise ConfigError(f'unknown mode {mode}', field='mode')
    elapsed = time.perf_counter() - started

    tagged = sorted(((order, r.worker, out) for r in results for out, order in r.outputs),
                    key=lambda t: (t[0], t[1]))
    outputs = [out for _, _, out in tagged]
    checkpoints = sorted((c for r in results for c in r.checkpoints), key=lambda c: c.o_value)
    latencies = [x for r in results for x in r.latencies]
    stats = RunStats(
        mode=mode,
        workers={r.worker: r.stats for r in results},
        events=sum(1 for s in streams for m in s if not is_heartbeat(m)),
        outputs=len(outputs),
        wall_time=elapsed,
        latency={f'p{q}': _percentile(latencies, q / 100) for q in (10, 50, 90)} if mode == 'concurrent' else {},
        release_violations=[v for r in results for v in r.release_violations],
        leaves=tuple(n.id for n in plan.leaves()),
        root_ids=tuple(r.id for r in plan.roots),
        depth=plan.depth(),
    )
    logger.info('%s run of %s: %d events, %d outputs, %d workers in %.3fs',
                mode, p.name, stats.events, stats.outputs, len(workers), elapsed)
    return RunResult(outputs, stats, checkpoints)
