"""Page-view join: views and address lookups read a user's zipcode, address updates write it."""
from dgsflow.program import DgsProgram, Fork, Join, StateType
from dgsflow.streams import Event
from dgsflow.tags import DependenceRelation, ImplTag, Tag

NAME = 'page-view'
DEFAULT_UIDS = (1, 2)
NO_ZIPCODE = 'no_zipcode'
UPDATE, GET, VIEW = 'update_user_address', 'get_user_address', 'page_view'
GET_RATIO = 100


def uid_tags(uid):
    return (Tag.of(UPDATE, uid), Tag.of(GET, uid), Tag.of(VIEW, uid))


def tag_alphabet(uids=DEFAULT_UIDS):
    return frozenset(t for uid in uids for t in uid_tags(uid))


def dependence(uids=DEFAULT_UIDS):
    def depends(a, b):
        return a.key == b.key and UPDATE in (a.name, b.name)
    return DependenceRelation.from_function(tag_alphabet(uids), depends)


def update(state, event):
    uid = event.tag.key[0]
    if event.tag.name == UPDATE:
        return {**state, uid: event.payload}, [('update', uid, event.payload)]
    return state, [(event.tag.name, uid, state.get(uid, NO_ZIPCODE))]


def canonical(state):
    return tuple(sorted(state.items()))


def _admits(pred, uid):
    return any(t in pred for t in uid_tags(uid))


def fork(state, pred1, pred2):
    """Each leg gets the users its predicate touches; users neither touches stay on the left."""
    left = {uid: zipcode for uid, zipcode in state.items()
            if _admits(pred1, uid) or not _admits(pred2, uid)}
    right = {uid: zipcode for uid, zipcode in state.items() if _admits(pred2, uid)}
    return left, right


def join(left, right):
    return {**right, **left}


def page_view_program(uids=DEFAULT_UIDS):
    alphabet = tag_alphabet(uids)
    return DgsProgram(
        name=NAME,
        alphabet=alphabet,
        rel=dependence(uids),
        state_types=(StateType('addresses', alphabet, update, canonical),),
        init=dict,
        forks=(Fork('split_uids', 0, (0, 0), fork),),
        joins=(Join('merge_left', (0, 0), 0, join),),
        description='user address table joined against page views',
    )


def program(streams=2, uids=DEFAULT_UIDS):
    return page_view_program(uids)


def itags_for(streams, uids=DEFAULT_UIDS):
    """View streams 0..k-1 carry views and lookups of every uid; stream k carries updates."""
    itags = [ImplTag(Tag.of(kind, uid), s) for s in range(streams) for uid in uids for kind in (GET, VIEW)]
    return itags + [ImplTag(Tag.of(UPDATE, uid), streams) for uid in uids]


def zipcode_payload(rng):
    return rng.randrange(10000, 100000)


def event_gen(p):
    alphabet = sorted(p.alphabet)

    def gen(rng):
        tag = rng.choice(alphabet)
        payload = zipcode_payload(rng) if tag.name == UPDATE else ()
        return Event(ImplTag(tag, 0), rng.randrange(1, 1000), payload)
    return gen
