"""DGS programs: state types, fused update/out, forks, joins, and their sequential semantics."""
import logging
from dataclasses import dataclass, field

from dgsflow.errors import IncompatiblePair, UnknownTag, Violation
from dgsflow.tags import validate_dependence

logger = logging.getLogger(__name__)


def _identity(state):
    return state


@dataclass(frozen=True)
class Output:
    value: object
    ts: int

    def to_dict(self):
        return {'value': self.value, 'ts': self.ts}


@dataclass(frozen=True)
class StateType:
    """`update(state, event) -> (state, [output values])`; `pred` is a finite tag set."""

    name: str
    pred: frozenset
    update: object
    canonical: object = _identity


@dataclass(frozen=True)
class Fork:
    name: str
    source: int
    targets: tuple
    fn: object

    def __call__(self, state, pred1, pred2):
        return self.fn(state, pred1, pred2)


@dataclass(frozen=True)
class Join:
    name: str
    sources: tuple
    target: int
    fn: object

    def __call__(self, left, right):
        return self.fn(left, right)


@dataclass(frozen=True)
class DgsProgram:
    name: str
    alphabet: frozenset
    rel: object
    state_types: tuple
    init: object
    forks: tuple = ()
    joins: tuple = ()
    description: str = field(default='', compare=False)

    def init_state(self):
        return self.init() if callable(self.init) else self.init

    def pred(self, sid):
        return self.state_types[sid].pred

    def canonical(self, sid, state):
        return self.state_types[sid].canonical(state)

    def fork(self, name):
        for f in self.forks:
            if f.name == name:
                return f
        raise KeyError(f'program {self.name} has no fork named {name!r}')

    def join(self, name):
        for j in self.joins:
            if j.name == name:
                return j
        raise KeyError(f'program {self.name} has no join named {name!r}')

    def compatible_pairs(self, source=None):
        """(fork, join) pairs in declaration order whose state types line up."""
        pairs = []
        for f in self.forks:
            if source is not None and f.source != source:
                continue
            for j in self.joins:
                if tuple(j.sources) == tuple(f.targets) and j.target == f.source:
                    pairs.append((f, j))
        return pairs

    def check_pair(self, fork, join):
        if tuple(join.sources) != tuple(fork.targets) or join.target != fork.source:
            raise IncompatiblePair(
                f'fork {fork.name} {fork.source}->{fork.targets} does not pair with '
                f'join {join.name} {join.sources}->{join.target}')

    def step(self, sid, state, event):
        """Apply update_sid to one event; returns (state, [Output])."""
        if event.tag not in self.state_types[sid].pred:
            raise UnknownTag(
                f'event {event} is not admitted by state type {self.state_types[sid].name}',
                tag=str(event.tag))
        state, values = self.state_types[sid].update(state, event)
        return state, [Output(v, event.ts) for v in values]

    def validate(self):
        violations = list(validate_dependence(self.rel, self.alphabet))
        if not self.state_types:
            violations.append(Violation('state_types', 'program declares no state types'))
            return violations
        if frozenset(self.state_types[0].pred) != frozenset(self.alphabet):
            violations.append(Violation('pred_0', 'state type 0 must admit the full alphabet'))
        for sid, st in enumerate(self.state_types):
            extra = set(st.pred) - set(self.alphabet)
            if extra:
                violations.append(Violation(
                    'predicate', f'state type {st.name} uses tags outside the alphabet: '
                    + ', '.join(sorted(str(t) for t in extra)), (sid,)))
        count = len(self.state_types)
        for f in self.forks:
            if not 0 <= f.source < count or any(not 0 <= t < count for t in f.targets):
                violations.append(Violation('fork', f'fork {f.name} names an unknown state type'))
        for j in self.joins:
            if not 0 <= j.target < count or any(not 0 <= s < count for s in j.sources):
                violations.append(Violation('join', f'join {j.name} names an unknown state type'))
        return violations


def fold(p, events, sid=0, state=None):
    """Sequential fold of update_sid/out_sid; returns (final state, outputs)."""
    state = p.init_state() if state is None else state
    outputs = []
    for event in events:
        state, out = p.step(sid, state, event)
        outputs.extend(out)
    return state, outputs


def fold_states(p, events, sid=0):
    """Yield (event, state before event) along the sequential fold."""
    state = p.init_state()
    for event in events:
        yield event, state
        state, _ = p.step(sid, state, event)


def sequential_spec(p, events):
    for event in events:
        if event.tag not in p.alphabet:
            raise UnknownTag(f'event tag {event.tag} is not in the alphabet of {p.name}', tag=str(event.tag))
    _, outputs = fold(p, events)
    return outputs
