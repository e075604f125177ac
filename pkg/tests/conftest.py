import pytest

from dgsflow.apps import fraud, key_counter, page_view, value_barrier
from dgsflow.plan import SyncPlan, WorkerNode
from dgsflow.streams import Event
from dgsflow.tags import ImplTag, Tag


def i(k):
    return Tag.of('i', k)


def r(k):
    return Tag.of('r', k)


def events(*tags, stream=0, start=1):
    """Consecutive single-stream events at ts start, start+1, ..."""
    return [Event.at(tag, stream, start + n, seq=n) for n, tag in enumerate(tags)]


# Two keys: r(2) synchronizes a stream of its own, i(2) runs on two streams
R1, I1, R2, I2A, I2B = (ImplTag(r(1), 0), ImplTag(i(1), 1), ImplTag(r(2), 2),
                        ImplTag(i(2), 3), ImplTag(i(2), 4))


@pytest.fixture
def counter():
    return key_counter.key_counter_program()


@pytest.fixture
def barrier():
    return value_barrier.value_barrier_program(2)


@pytest.fixture
def views():
    return page_view.page_view_program()


@pytest.fixture
def fraud_program():
    return fraud.fraud_detection_program(2)


@pytest.fixture
def two_key_plan():
    """w1 root; w2 owns r(1), i(1); w3 owns r(2) above leaves w4: i(2)_a and w5: i(2)_b."""
    w4 = WorkerNode('w4', itags=frozenset({I2A}))
    w5 = WorkerNode('w5', itags=frozenset({I2B}))
    w3 = WorkerNode('w3', itags=frozenset({R2}), fork='split_keys', join='sum_keys', children=(w4, w5))
    w2 = WorkerNode('w2', itags=frozenset({R1, I1}))
    return SyncPlan((WorkerNode('w1', fork='split_keys', join='sum_keys', children=(w2, w3)),))


@pytest.fixture
def two_key_rates():
    from dgsflow.optimizer import RateSpec

    return RateSpec.from_dict({'itags': [
        {'tag': 'r(1)', 'stream': 0, 'rate': 15, 'location': 'E1'},
        {'tag': 'i(1)', 'stream': 1, 'rate': 100, 'location': 'E1'},
        {'tag': 'r(2)', 'stream': 2, 'rate': 10, 'location': 'E0'},
        {'tag': 'i(2)', 'stream': 3, 'rate': 200, 'location': 'E2'},
        {'tag': 'i(2)', 'stream': 4, 'rate': 300, 'location': 'E3'},
    ]})


@pytest.fixture
def client(tmp_path):
    from dgsflow.app import create_app

    app = create_app({
        'TESTING': True,
        'SQLALCHEMY_DATABASE_URI': 'sqlite:///:memory:',
        'MAX_API_EVENTS': 2000,
    })
    with app.test_client() as client:
        yield client
