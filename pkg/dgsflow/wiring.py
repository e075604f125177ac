"""Wire diagrams: a pure interpreter for parallel executions and a random diagram generator."""
import random
from dataclasses import dataclass

from dgsflow.errors import InvalidDiagram, NoValidDiagram
from dgsflow.tags import indep_preds


@dataclass(frozen=True)
class Leaf:
    segment: tuple


@dataclass(frozen=True)
class Seq:
    first: object
    second: object


@dataclass(frozen=True)
class Par:
    fork: str
    join: str
    pred1: frozenset
    pred2: frozenset
    left: object
    right: object


def seq(*parts):
    """Right-nested Seq over the given diagrams (a single part is returned as is)."""
    parts = [p for p in parts if p is not None]
    if not parts:
        return Leaf(())
    diagram = parts[-1]
    for part in reversed(parts[:-1]):
        diagram = Seq(part, diagram)
    return diagram


def diagram_events(d):
    if isinstance(d, Leaf):
        return list(d.segment)
    if isinstance(d, Seq):
        return diagram_events(d.first) + diagram_events(d.second)
    return diagram_events(d.left) + diagram_events(d.right)


def _interleave(v1, v2, rng):
    merged, i, j = [], 0, 0
    while i < len(v1) or j < len(v2):
        if j >= len(v2) or (i < len(v1) and rng.random() < 0.5):
            merged.append(v1[i])
            i += 1
        else:
            merged.append(v2[j])
            j += 1
    return merged


def _eval(p, d, sid, pred, state, rng):
    if isinstance(d, Leaf):
        outputs = []
        for event in d.segment:
            if event.tag not in pred:
                raise InvalidDiagram(f'event {event} does not satisfy the wire predicate')
            state, out = p.step(sid, state, event)
            outputs.extend(out)
        return state, outputs
    if isinstance(d, Seq):
        state, v1 = _eval(p, d.first, sid, pred, state, rng)
        state, v2 = _eval(p, d.second, sid, pred, state, rng)
        return state, v1 + v2
    if isinstance(d, Par):
        try:
            fork, join = p.fork(d.fork), p.join(d.join)
        except KeyError as e:
            raise InvalidDiagram(str(e))
        if fork.source != sid:
            raise InvalidDiagram(f'fork {fork.name} does not start from state type {sid}')
        p.check_pair(fork, join)
        if not indep_preds(d.pred1, d.pred2, p.rel):
            raise InvalidDiagram('Par predicates are not independent')
        if not (d.pred1 <= pred and d.pred2 <= pred):
            raise InvalidDiagram('Par predicates must imply the enclosing wire predicate')
        left_sid, right_sid = fork.targets
        if not (d.pred1 <= p.pred(left_sid) and d.pred2 <= p.pred(right_sid)):
            raise InvalidDiagram('Par predicates must imply the predicates of the forked state types')
        s1, s2 = fork(state, d.pred1, d.pred2)
        s1, v1 = _eval(p, d.left, left_sid, d.pred1, s1, rng)
        s2, v2 = _eval(p, d.right, right_sid, d.pred2, s2, rng)
        return join(s1, s2), _interleave(v1, v2, rng)
    raise InvalidDiagram(f'unknown diagram node {d!r}')


def eval_wire_diagram(p, d, interleave_seed=0):
    _, outputs = eval_wire_diagram_state(p, d, interleave_seed)
    return outputs


def eval_wire_diagram_state(p, d, interleave_seed=0):
    rng = random.Random(interleave_seed)
    return _eval(p, d, 0, frozenset(p.alphabet), p.init_state(), rng)


def random_independent_preds(p, pool, rng, left_limit, right_limit, seed_tag=None):
    """Random (pred1, pred2) drawn from `pool`, independent of each other."""
    pred1 = {seed_tag} if seed_tag is not None else set()
    pred2 = set()
    for tag in rng.sample(sorted(pool), len(pool)):
        roll = rng.random()
        if roll < 0.4 and tag in left_limit and indep_preds({tag}, pred2, p.rel):
            pred1.add(tag)
        elif roll < 0.8 and tag in right_limit and indep_preds({tag}, pred1, p.rel):
            pred2.add(tag)
    return frozenset(pred1), frozenset(pred2)


def _random_diagram(p, events, sid, pred, depth, rng, split=None):
    if depth <= 0 or len(events) < 2:
        return Leaf(tuple(events))
    pairs = p.compatible_pairs(source=sid)
    if not pairs:
        if split is not None:
            raise NoValidDiagram(f'no fork/join pair starts from state type {sid}')
        return Leaf(tuple(events))
    fork, join = pairs[rng.randrange(len(pairs))] if split is None else pairs[0]
    left_sid, right_sid = fork.targets
    if split is not None:
        pred1, pred2 = frozenset(split[0]), frozenset(split[1])
        if not indep_preds(pred1, pred2, p.rel) or not (pred1 <= pred and pred2 <= pred):
            raise NoValidDiagram('requested split is not a pair of independent sub-predicates')
        if not (pred1 <= p.pred(left_sid) and pred2 <= p.pred(right_sid)):
            raise NoValidDiagram(f'fork {fork.name} cannot carry the requested split')
    else:
        pred1, pred2 = random_independent_preds(
            p, pred, rng, pred & p.pred(left_sid), pred & p.pred(right_sid))

    parts, run = [], []

    def close_run():
        if not run:
            return
        left = [e for e in run if e.tag in pred1]
        right = [e for e in run if e.tag not in pred1]
        both = [e for e in run if e.tag in pred1 and e.tag in pred2]
        if both:
            moved = {id(e) for e in both if rng.random() < 0.5}
            left = [e for e in run if e.tag in pred1 and id(e) not in moved]
            right = [e for e in run if id(e) in moved or e.tag not in pred1]
        parts.append(Par(
            fork.name, join.name, pred1, pred2,
            _random_diagram(p, left, left_sid, pred1, depth - 1, rng),
            _random_diagram(p, right, right_sid, pred2, depth - 1, rng),
        ))
        run.clear()

    for event in events:
        if event.tag in pred1 or event.tag in pred2:
            run.append(event)
        else:
            close_run()
            parts.append(Leaf((event,)))
    close_run()
    return seq(*parts)


def random_wire_diagram(p, events, depth, seed, split=None):
    """A structurally valid diagram whose leaves partition `events` in order."""
    if depth < 0:
        raise NoValidDiagram(f'depth must be >= 0, got {depth}')
    rng = random.Random(seed)
    return _random_diagram(p, list(events), 0, frozenset(p.alphabet), depth, rng, split=split)
