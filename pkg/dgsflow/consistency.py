"""Randomized checks of the three consistency conditions a DGS program must satisfy.

C1: join(update_j(s1, e), s2) == update_i(join(s1, s2), e), outputs included.
C2: join(fork(s, p1, p2)) == s.
C3: independent events commute on a state type, outputs compared as concatenations.
"""
import logging
import random
from dataclasses import dataclass, field

from dgsflow.config import CheckConfig
from dgsflow.encoding import to_jsonable
from dgsflow.errors import GeneratorExhausted, PreconditionUnsatisfiable
from dgsflow.streams import Event
from dgsflow.tags import ImplTag
from dgsflow.wiring import random_independent_preds

logger = logging.getLogger(__name__)

C1, C2, C3 = 'C1', 'C2', 'C3'


def _values(outputs):
    return [o.value for o in outputs]


@dataclass(frozen=True)
class Counterexample:
    """Inputs of a failing check together with both sides of the equation."""

    condition: str
    binding: tuple
    inputs: dict
    lhs: object
    rhs: object

    def replay(self, p):
        if self.condition == C1:
            return check_c1(p, self.binding[0], **self.inputs)
        if self.condition == C2:
            return check_c2(p, self.binding[0], self.binding[1], **self.inputs)
        return check_c3(p, self.binding[0], **self.inputs)

    def to_dict(self):
        return {
            'condition': self.condition,
            'binding': list(self.binding),
            'inputs': to_jsonable(self.inputs),
            'lhs': to_jsonable(self.lhs),
            'rhs': to_jsonable(self.rhs),
        }


def _resolve_join(p, join):
    return p.join(join) if isinstance(join, str) else join


def _resolve_fork(p, fork):
    return p.fork(fork) if isinstance(fork, str) else fork


def check_c1(p, join, e, s1, s2):
    join = _resolve_join(p, join)
    target, left = join.target, join.sources[0]
    if e.tag not in p.pred(target) or e.tag not in p.pred(left):
        raise PreconditionUnsatisfiable(
            f'event {e} is not admitted by both state types of join {join.name}', join=join.name)
    updated, out_left = p.step(left, s1, e)
    lhs_state = join(updated, s2)
    rhs_state, out_right = p.step(target, join(s1, s2), e)
    lhs = (p.canonical(target, lhs_state), _values(out_left))
    rhs = (p.canonical(target, rhs_state), _values(out_right))
    if lhs == rhs:
        return None
    return Counterexample(C1, (join.name,), {'e': e, 's1': s1, 's2': s2}, lhs, rhs)


def check_c2(p, fork, join, s, p1, p2):
    fork, join = _resolve_fork(p, fork), _resolve_join(p, join)
    p.check_pair(fork, join)
    left, right = fork(s, p1, p2)
    lhs = p.canonical(fork.source, join(left, right))
    rhs = p.canonical(fork.source, s)
    if lhs == rhs:
        return None
    return Counterexample(C2, (fork.name, join.name), {'s': s, 'p1': p1, 'p2': p2}, lhs, rhs)


def check_c3(p, sid, s, e1, e2):
    pred = p.pred(sid)
    if e1.tag not in pred or e2.tag not in pred:
        raise PreconditionUnsatisfiable(f'events must be admitted by state type {sid}', state_type=sid)
    if p.rel.depends(e1.tag, e2.tag):
        raise PreconditionUnsatisfiable(f'{e1.tag} and {e2.tag} are dependent', state_type=sid)
    a, out_a1 = p.step(sid, s, e1)
    a, out_a2 = p.step(sid, a, e2)
    b, out_b2 = p.step(sid, s, e2)
    b, out_b1 = p.step(sid, b, e1)
    lhs = (p.canonical(sid, a), _values(out_a1) + _values(out_a2))
    rhs = (p.canonical(sid, b), _values(out_b1) + _values(out_b2))
    if lhs == rhs:
        return None
    return Counterexample(C3, (sid,), {'s': s, 'e1': e1, 'e2': e2}, lhs, rhs)


@dataclass
class ConditionResult:
    cases: int = 0
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {'cases': self.cases, 'failures': [f.to_dict() for f in self.failures]}


@dataclass
class ConsistencyReport:
    program: str
    seed: int
    results: dict = field(default_factory=dict)

    def result(self, condition, binding):
        key = f"{condition}[{','.join(str(b) for b in binding)}]"
        return self.results.setdefault(key, ConditionResult())

    @property
    def total_cases(self):
        return sum(r.cases for r in self.results.values())

    @property
    def failures(self):
        return [f for r in self.results.values() for f in r.failures]

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {
            'success': self.ok,
            'program': self.program,
            'seed': self.seed,
            'total_cases': self.total_cases,
            'failure_count': len(self.failures),
            'results': {k: v.to_dict() for k, v in sorted(self.results.items())},
        }


def uniform_event_gen(p, payload=lambda rng, tag: ()):
    """Events with a uniformly random tag of `p`'s alphabet on stream 0."""
    alphabet = sorted(p.alphabet)

    def gen(rng):
        tag = rng.choice(alphabet)
        return Event(ImplTag(tag, 0), rng.randrange(1, 1000), payload(rng, tag))
    return gen


class _Sampler:
    def __init__(self, p, event_gen, rng, config):
        self.p = p
        self.event_gen = event_gen
        self.rng = rng
        self.config = config

    def event(self, accept, what):
        for _ in range(self.config.max_rejections):
            e = self.event_gen(self.rng)
            if accept(e.tag):
                return e
        raise GeneratorExhausted(
            f'event generator produced no {what} within {self.config.max_rejections} draws',
            program=self.p.name)

    def fold(self, sid, state, pred):
        """Random run of events admitted by `pred` applied to `state`."""
        if not pred:
            return state
        for _ in range(self.rng.randint(0, self.config.max_state_events)):
            e = self.event(lambda t: t in pred, f'event admitted by {sorted(map(str, pred))}')
            state, _ = self.p.step(sid, state, e)
        return state


def default_state_gen(p, event_gen, config=None):
    """States of a given type reached by forking init down to it and folding random events."""
    config = config or CheckConfig()

    def gen(sid, rng):
        sampler = _Sampler(p, event_gen, rng, config)
        state = sampler.fold(0, p.init_state(), p.pred(0))
        current = 0
        for fork, side in _fork_path(p, sid):
            left, right = fork.targets
            pool = p.pred(current)
            preds = random_independent_preds(p, pool, rng, pool & p.pred(left), pool & p.pred(right))
            current = fork.targets[side]
            state = sampler.fold(current, fork(state, *preds)[side], preds[side])
        return state
    return gen


def _fork_path(p, sid):
    """(fork, leg index) steps leading from state type 0 to `sid`, breadth-first."""
    frontier, seen = [(0, [])], {0}
    while frontier:
        current, path = frontier.pop(0)
        if current == sid:
            return path
        for fork in p.forks:
            if fork.source != current:
                continue
            for side, target in enumerate(fork.targets):
                if target not in seen:
                    seen.add(target)
                    frontier.append((target, path + [(fork, side)]))
    return []


def _c1_cases(p, join, n, sampler, state_gen, report):
    target, (left, right) = join.target, join.sources
    result = report.result(C1, (join.name,))
    both = p.pred(target) & p.pred(left)
    if not both:
        logger.info('C1 for %s: no tag admitted by both state types, skipped', join.name)
        return
    forks = [f for f, j in p.compatible_pairs(source=target) if j.name == join.name]
    for _ in range(n):
        e = sampler.event(lambda t: t in both, f'event for join {join.name}')
        base = state_gen(target, sampler.rng)
        pred1, pred2 = random_independent_preds(
            p, p.pred(target), sampler.rng, p.pred(left), p.pred(right), seed_tag=e.tag)
        if forks:
            s1, s2 = forks[0](base, pred1, pred2)
        else:
            s1, s2 = state_gen(left, sampler.rng), state_gen(right, sampler.rng)
        s1 = sampler.fold(left, s1, pred1)
        s2 = sampler.fold(right, s2, pred2)
        result.cases += 1
        witness = check_c1(p, join, e, s1, s2)
        if witness is not None:
            result.failures.append(witness)


def _c2_cases(p, fork, join, n, sampler, state_gen, report):
    result = report.result(C2, (fork.name, join.name))
    pool = p.pred(fork.source)
    left, right = fork.targets
    for _ in range(n):
        s = state_gen(fork.source, sampler.rng)
        pred1, pred2 = random_independent_preds(
            p, pool, sampler.rng, pool & p.pred(left), pool & p.pred(right))
        result.cases += 1
        witness = check_c2(p, fork, join, s, pred1, pred2)
        if witness is not None:
            result.failures.append(witness)


def _c3_cases(p, sid, n, sampler, state_gen, report):
    pred = p.pred(sid)
    commuting = {t for t in pred if any(p.rel.indep(t, u) for u in pred)}
    result = report.result(C3, (sid,))
    if not commuting:
        logger.info('C3 for state type %d: no independent tag pair, skipped', sid)
        return
    for _ in range(n):
        e1 = sampler.event(lambda t: t in commuting, f'commuting event for state type {sid}')
        e2 = sampler.event(lambda t: t in pred and p.rel.indep(e1.tag, t),
                           f'event independent of {e1.tag}')
        s = state_gen(sid, sampler.rng)
        result.cases += 1
        witness = check_c3(p, sid, s, e1, e2)
        if witness is not None:
            result.failures.append(witness)


def run_consistency_suite(p, state_gen=None, event_gen=None, n=1000, seed=0, config=None):
    """Run `n` cases of each condition for every join, fork/join pair and state type."""
    config = config or CheckConfig(cases=n, seed=seed)
    report = ConsistencyReport(program=p.name, seed=seed)
    if n <= 0:
        return report
    rng = random.Random(seed)
    event_gen = event_gen or uniform_event_gen(p)
    state_gen = state_gen or default_state_gen(p, event_gen, config)
    sampler = _Sampler(p, event_gen, rng, config)

    for join in p.joins:
        _c1_cases(p, join, n, sampler, state_gen, report)
    for fork, join in p.compatible_pairs():
        _c2_cases(p, fork, join, n, sampler, state_gen, report)
    for sid in range(len(p.state_types)):
        _c3_cases(p, sid, n, sampler, state_gen, report)

    logger.info('consistency suite for %s: %d cases, %d failures',
                p.name, report.total_cases, len(report.failures))
    return report
