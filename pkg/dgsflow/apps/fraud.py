"""Fraud detection: flag transactions congruent mod 1000 to the last rule's timestamp + 1."""
from dataclasses import dataclass

from dgsflow.apps.value_barrier import BARRIER, barrier_dependence, tag_alphabet, value_payload
from dgsflow.program import DgsProgram, Fork, Join, StateType
from dgsflow.streams import Event
from dgsflow.tags import ImplTag, Tag

NAME = 'fraud'
MODULO = 1000


@dataclass(frozen=True)
class FraudState:
    sum: int = 0
    prev_b_modulo: int = 0


def update(state, event):
    if event.tag == BARRIER:
        return FraudState(state.sum, (event.ts + 1) % MODULO), [('sum', state.sum)]
    outputs = [('flagged', event.payload)] if event.payload % MODULO == state.prev_b_modulo else []
    return FraudState(state.sum + event.payload, state.prev_b_modulo), outputs


def fork(state, pred1, pred2):
    return state, FraudState(0, state.prev_b_modulo)


def join(left, right):
    return FraudState(left.sum + right.sum, left.prev_b_modulo)


def fraud_detection_program(streams=2):
    alphabet = tag_alphabet(streams)
    return DgsProgram(
        name=NAME,
        alphabet=alphabet,
        rel=barrier_dependence(alphabet),
        state_types=(StateType('fraud', alphabet, update),),
        init=FraudState,
        forks=(Fork('share_rule', 0, (0, 0), fork),),
        joins=(Join('add_keep_rule', (0, 0), 0, join),),
        description='transaction flagging against the most recent rule',
    )


def program(streams=2):
    return fraud_detection_program(streams)


def itags_for(streams):
    return [ImplTag(Tag.of('a', i), i) for i in range(streams)] + [ImplTag(BARRIER, streams)]


def event_gen(p):
    alphabet = sorted(p.alphabet)

    def gen(rng):
        tag = rng.choice(alphabet)
        payload = () if tag == BARRIER else value_payload(rng)
        return Event(ImplTag(tag, 0), rng.randrange(1, 1000), payload)
    return gen
