def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    assert response.get_json()['status'] == 'healthy'


def test_list_apps(client):
    data = client.get('/api/apps?streams=3').get_json()
    assert data['success']
    by_name = {a['name']: a for a in data['apps']}
    assert set(by_name) == {'fraud', 'key-counter', 'page-view', 'value-barrier'}
    assert by_name['value-barrier']['itags'] == ['a(0)@0', 'a(1)@1', 'a(2)@2', 'b@3']


def test_check(client):
    response = client.post('/api/check', json={'app': 'value-barrier', 'cases': 30})
    assert response.status_code == 200
    data = response.get_json()
    assert data['success'] is True
    assert data['total_cases'] == 90


def test_check_validation_errors(client):
    response = client.post('/api/check', json={'cases': 30})
    assert response.status_code == 400
    assert response.get_json()['error_type'] == 'ConfigError'
    response = client.post('/api/check', json={'app': 'key-counter', 'cases': 10 ** 6})
    assert response.status_code == 400
    response = client.post('/api/check', json={'app': 'no-such-app'})
    assert response.status_code == 400


def test_plan(client):
    body = {'app': 'key-counter', 'itags': [
        {'tag': 'r(1)', 'stream': 0, 'rate': 15, 'location': 'E1'},
        {'tag': 'i(1)', 'stream': 1, 'rate': 100, 'location': 'E1'},
        {'tag': 'r(2)', 'stream': 2, 'rate': 10, 'location': 'E0'},
        {'tag': 'i(2)', 'stream': 3, 'rate': 200, 'location': 'E2'},
        {'tag': 'i(2)', 'stream': 4, 'rate': 300, 'location': 'E3'},
    ]}
    response = client.post('/api/plans', json=body)
    assert response.status_code == 200
    data = response.get_json()
    assert data['cost'] == 30.0
    assert data['plan']['trees'][0]['location'] == 'E0'
    assert data['dot'].startswith('digraph plan {')


def test_plan_requires_rates(client):
    response = client.post('/api/plans', json={'app': 'key-counter'})
    assert response.status_code == 400


def test_run_lifecycle(client):
    response = client.post('/api/runs', json={'app': 'value-barrier', 'streams': 2, 'events_per_stream': 40,
                                              'sync_ratio': 10, 'heartbeat_period': 5})
    assert response.status_code == 201
    run = response.get_json()['run']
    assert run['status'] == 'completed'
    assert run['outputs_count'] == 4
    assert run['checkpoints_count'] == 4

    listed = client.get('/api/runs').get_json()['runs']
    assert [r['id'] for r in listed] == [run['id']]

    detail = client.get(f"/api/runs/{run['id']}").get_json()['run']
    assert len(detail['outputs']) == 4
    assert set(detail['outputs'][0]) == {'value', 'ts'}

    checkpoints = client.get(f"/api/runs/{run['id']}/checkpoints").get_json()['checkpoints']
    assert [c['o_value'][0] for c in checkpoints] == [21, 41, 61, 81]

    assert client.delete(f"/api/runs/{run['id']}").status_code == 200
    assert client.get(f"/api/runs/{run['id']}").status_code == 404


def test_run_limits_and_validation(client):
    response = client.post('/api/runs', json={'app': 'key-counter', 'events_per_stream': 5000})
    assert response.status_code == 400
    assert response.get_json()['error_type'] == 'ConfigError'
    response = client.post('/api/runs', json={'app': 'key-counter', 'plan': '/etc/passwd'})
    assert response.status_code == 400
    response = client.post('/api/runs', json={'app': 'key-counter', 'streams': 0})
    assert response.status_code == 400


def test_unknown_routes(client):
    assert client.get('/api/nothing').status_code == 404
    assert client.get('/api/runs/999').status_code == 404
