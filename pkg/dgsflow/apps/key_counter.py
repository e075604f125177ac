"""Map from keys to counters: i(k) increments key k, r(k) outputs its count and resets it."""
from dgsflow.program import DgsProgram, Fork, Join, StateType
from dgsflow.streams import Event
from dgsflow.tags import DependenceRelation, ImplTag, Tag

NAME = 'key-counter'
DEFAULT_KEYS = (1, 2)


def tag_alphabet(keys=DEFAULT_KEYS):
    return frozenset([Tag.of('i', k) for k in keys] + [Tag.of('r', k) for k in keys])


def dependence(keys=DEFAULT_KEYS):
    def depends(a, b):
        if a.key != b.key:
            return False
        return a.name == 'r' or b.name == 'r'
    return DependenceRelation.from_function(tag_alphabet(keys), depends)


def update(state, event):
    key = event.tag.key[0]
    if event.tag.name == 'i':
        return {**state, key: state.get(key, 0) + 1}, []
    count = state.get(key, 0)
    return {**state, key: 0}, [count]


def canonical(state):
    return tuple(sorted((k, v) for k, v in state.items() if v))


def fork(state, pred1, pred2):
    left, right = {}, {}
    for key, count in state.items():
        if Tag.of('r', key) in pred1:
            left[key] = count
        else:
            right[key] = count
    return left, right


def join(left, right):
    merged = dict(left)
    for key, count in right.items():
        merged[key] = merged.get(key, 0) + count
    return merged


def key_counter_program(keys=DEFAULT_KEYS):
    alphabet = tag_alphabet(keys)
    return DgsProgram(
        name=NAME,
        alphabet=alphabet,
        rel=dependence(keys),
        state_types=(StateType('counters', alphabet, update, canonical),),
        init=dict,
        forks=(Fork('split_keys', 0, (0, 0), fork),),
        joins=(Join('sum_keys', (0, 0), 0, join),),
        description='per-key counters with read-reset',
    )


def program(streams=2, keys=DEFAULT_KEYS):
    return key_counter_program(keys)


def itags_for(streams, keys=DEFAULT_KEYS):
    """Increment streams 0..k-1 carry every i(k); stream k carries the read-resets."""
    itags = [ImplTag(Tag.of('i', key), s) for s in range(streams) for key in keys]
    return itags + [ImplTag(Tag.of('r', key), streams) for key in keys]


def event_gen(p):
    alphabet = sorted(p.alphabet)

    def gen(rng):
        return Event(ImplTag(rng.choice(alphabet), 0), rng.randrange(1, 1000), ())
    return gen
