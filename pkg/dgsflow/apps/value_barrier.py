"""Event-based windowing: values a(i) are summed and every barrier b emits the window's sum."""
from dgsflow.program import DgsProgram, Fork, Join, StateType
from dgsflow.streams import Event
from dgsflow.tags import DependenceRelation, ImplTag, Tag

NAME = 'value-barrier'
BARRIER = Tag.of('b')
MAX_VALUE = 10000


def tag_alphabet(streams=2):
    return frozenset([Tag.of('a', i) for i in range(streams)] + [BARRIER])


def barrier_dependence(alphabet):
    """Every value depends on the barrier, and the barrier on itself."""
    def depends(a, b):
        return a == BARRIER or b == BARRIER
    return DependenceRelation.from_function(alphabet, depends)


def update(state, event):
    if event.tag == BARRIER:
        return 0, [state]
    return state + event.payload, []


def fork(state, pred1, pred2):
    return state, 0


def join(left, right):
    return left + right


def value_barrier_program(streams=2):
    alphabet = tag_alphabet(streams)
    return DgsProgram(
        name=NAME,
        alphabet=alphabet,
        rel=barrier_dependence(alphabet),
        state_types=(StateType('sum', alphabet, update),),
        init=0,
        forks=(Fork('keep_left', 0, (0, 0), fork),),
        joins=(Join('add', (0, 0), 0, join),),
        description='window sums between consecutive barriers',
    )


def program(streams=2):
    return value_barrier_program(streams)


def itags_for(streams):
    return [ImplTag(Tag.of('a', i), i) for i in range(streams)] + [ImplTag(BARRIER, streams)]


def value_payload(rng):
    return rng.randrange(MAX_VALUE)


def event_gen(p):
    alphabet = sorted(p.alphabet)

    def gen(rng):
        tag = rng.choice(alphabet)
        payload = () if tag == BARRIER else value_payload(rng)
        return Event(ImplTag(tag, 0), rng.randrange(1, 1000), payload)
    return gen
