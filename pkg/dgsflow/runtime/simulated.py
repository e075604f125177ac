"""Single-threaded execution with a seeded scheduler over router sends, deliveries and worker steps."""
import logging
import random
from collections import deque

from dgsflow.errors import Deadlock
from dgsflow.runtime.routing import Router
from dgsflow.runtime.worker import ROUTER, EndOfInput, RoutedEvent, RoutedHeartbeat
from dgsflow.streams import is_heartbeat

logger = logging.getLogger(__name__)


class Simulation:
    def __init__(self, workers, plan, streams, seed):
        self.workers = workers
        self.router = Router(plan)
        self.streams = [list(s) for s in streams]
        self.positions = [0] * len(self.streams)
        self.rng = random.Random(seed)
        self.channels = {}
        self.end_sent = False
        self.steps = 0

    def _send(self, sender, dst, msg):
        key = (sender, dst)
        if key not in self.channels:
            self.channels[key] = deque()
        self.channels[key].append(msg)

    def _route_next(self, stream):
        msg = self.streams[stream][self.positions[stream]]
        self.positions[stream] += 1
        for target, out in self.router.deliveries(msg):
            self._send(ROUTER, target, RoutedHeartbeat(out) if is_heartbeat(out) else RoutedEvent(out))

    def _actions(self):
        actions = [('route', s) for s, stream in enumerate(self.streams) if self.positions[s] < len(stream)]
        if not actions and not self.end_sent:
            actions.append(('end', None))
        actions.extend(('deliver', key) for key, channel in self.channels.items() if channel)
        actions.extend(('step', wid) for wid, w in self.workers.items() if w.can_step)
        return actions

    def run(self):
        while True:
            actions = self._actions()
            if not actions:
                break
            kind, arg = actions[self.rng.randrange(len(actions))]
            self.steps += 1
            if kind == 'route':
                self._route_next(arg)
            elif kind == 'end':
                self.end_sent = True
                for wid in self.workers:
                    self._send(ROUTER, wid, EndOfInput())
            elif kind == 'deliver':
                sender, dst = arg
                msg = self.channels[arg].popleft()
                for out_dst, out_msg in self.workers[dst].receive(sender, msg):
                    self._send(dst, out_dst, out_msg)
            else:
                for out_dst, out_msg in self.workers[arg].step():
                    self._send(arg, out_dst, out_msg)

        stuck = [w.describe() for w in self.workers.values() if not w.complete]
        if stuck:
            raise Deadlock(
                f'{len(stuck)} worker(s) cannot make progress; missing heartbeats or progress on some stream',
                workers=stuck)
        logger.debug('simulation finished after %d scheduler steps', self.steps)
        return [w.finish() for w in self.workers.values()]


def run_simulated(workers, plan, streams, seed=0):
    return Simulation(workers, plan, streams, seed).run()
