import csv
import json

import pytest
from click.testing import CliRunner

from dgsflow import cli as cli_module
from dgsflow.cli import cli
from dgsflow.consistency import C1, ConsistencyReport, Counterexample
from dgsflow.plan import SyncPlan
from dgsflow.streams import read_trace, validate_input_instance


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def trace(runner, tmp_path):
    path = str(tmp_path / 'trace.jsonl')
    result = runner.invoke(cli, ['gen', '--app', 'value-barrier', '--streams', '2', '--events', '30',
                                 '--sync-ratio', '6', '--heartbeat-period', '4', '--out', path])
    assert result.exit_code == 0, result.output
    return path


def first_json(text):
    return json.JSONDecoder().raw_decode(text[text.index('{'):])[0]


def test_gen_writes_a_valid_trace(trace):
    streams = read_trace(trace)
    assert len(streams) == 3
    assert validate_input_instance(streams) == []


def test_run_writes_outputs_and_is_reproducible(runner, trace, tmp_path):
    outputs = [tmp_path / 'a.jsonl', tmp_path / 'b.jsonl']
    for out in outputs:
        result = runner.invoke(cli, ['run', '--app', 'value-barrier', '--trace', trace, '--out', str(out),
                                     '--seed', '4'])
        assert result.exit_code == 0, result.output
    lines = outputs[0].read_text().splitlines()
    assert len(lines) == 5
    assert set(json.loads(lines[0])) == {'value', 'ts'}
    assert outputs[0].read_text() == outputs[1].read_text()


def test_run_with_checkpoints_and_stats(runner, trace, tmp_path):
    checkpoints, stats = tmp_path / 'cp.jsonl', tmp_path / 'stats.json'
    result = runner.invoke(cli, ['run', '--trace', trace, '--checkpoints', str(checkpoints),
                                 '--stats', str(stats)])
    assert result.exit_code == 0, result.output
    summary = json.loads(stats.read_text())
    assert summary['stats']['events'] == 65
    assert len(summary['plan']['trees']) == 1
    lines = checkpoints.read_text().splitlines()
    assert len(lines) == 5
    assert set(json.loads(lines[0])) == {'worker', 'o_value', 'state'}


def test_run_generated_workload_concurrently(runner):
    result = runner.invoke(cli, ['run', '--app', 'key-counter', '--workers', '2', '--events', '50',
                                 '--sync-ratio', '10', '--mode', 'concurrent', '--idle-timeout', '10'])
    assert result.exit_code == 0, result.output
    assert '✅' in result.output


def test_run_rejects_bad_plan_source(runner, trace):
    result = runner.invoke(cli, ['run', '--trace', trace, '--plan', 'nonsense'])
    assert result.exit_code == 1
    assert 'ConfigError' in result.output


def test_run_takes_program_shape_from_streams_option(runner, tmp_path):
    path = str(tmp_path / 'wide.jsonl')
    result = runner.invoke(cli, ['gen', '--app', 'value-barrier', '--streams', '4', '--events', '20',
                                 '--sync-ratio', '5', '--out', path])
    assert result.exit_code == 0, result.output
    result = runner.invoke(cli, ['run', '--app', 'value-barrier', '--trace', path])
    assert result.exit_code == 1
    assert 'ConfigError' in result.output
    assert '--streams' in result.output
    result = runner.invoke(cli, ['run', '--app', 'value-barrier', '--streams', '4', '--trace', path])
    assert result.exit_code == 0, result.output


def test_run_rejects_invalid_trace(runner, tmp_path):
    path = tmp_path / 'bad.jsonl'
    path.write_text('{"stream": 0, "tag": "a(0)", "ts": 5, "payload": 1}\n'
                    '{"stream": 0, "tag": "a(0)", "ts": 5, "payload": 2}\n')
    result = runner.invoke(cli, ['run', '--trace', str(path)])
    assert result.exit_code == 1
    assert 'InvalidInput' in result.output


def test_check_prints_a_report(runner):
    result = runner.invoke(cli, ['check', '--app', 'key-counter', '--cases', '50'])
    assert result.exit_code == 0, result.output
    report = first_json(result.output)
    assert report['success'] is True
    assert report['total_cases'] == 150


def test_check_failure_exits_with_2(runner, monkeypatch):
    def broken(name, cases, seed, streams):
        report = ConsistencyReport(program=name, seed=seed)
        report.result(C1, ('sum_keys',)).failures.append(Counterexample(C1, ('sum_keys',), {}, 1, 2))
        return report

    monkeypatch.setattr(cli_module, 'check_app', broken)
    result = runner.invoke(cli, ['check', '--app', 'key-counter'])
    assert result.exit_code == 2
    assert first_json(result.output)['failure_count'] == 1


def test_plan_from_rates(runner, tmp_path):
    rates = tmp_path / 'rates.json'
    rates.write_text(json.dumps({'itags': [
        {'tag': 'r(1)', 'stream': 0, 'rate': 15, 'location': 'E1'},
        {'tag': 'i(1)', 'stream': 1, 'rate': 100, 'location': 'E1'},
        {'tag': 'r(2)', 'stream': 2, 'rate': 10, 'location': 'E0'},
        {'tag': 'i(2)', 'stream': 3, 'rate': 200, 'location': 'E2'},
        {'tag': 'i(2)', 'stream': 4, 'rate': 300, 'location': 'E3'},
    ]}))
    out, dot = tmp_path / 'plan.json', tmp_path / 'plan.dot'
    result = runner.invoke(cli, ['plan', '--app', 'key-counter', '--rates', str(rates), '--out', str(out),
                                 '--dot', str(dot)])
    assert result.exit_code == 0, result.output
    plan = SyncPlan.from_json(out.read_text())
    assert len(plan.workers()) == 5
    assert dot.read_text().startswith('digraph plan {')
    assert 'communication cost 30' in result.output


def test_plan_with_missing_rates_file(runner, tmp_path):
    result = runner.invoke(cli, ['plan', '--app', 'key-counter', '--rates', str(tmp_path / 'nope.json')])
    assert result.exit_code == 1


def test_bench_writes_csv(runner, tmp_path):
    out = tmp_path / 'bench.csv'
    result = runner.invoke(cli, ['bench', '--workers', '1,2', '--events', '200', '--sync-ratio', '20',
                                 '--backend', 'thread', '--out', str(out)])
    assert result.exit_code == 0, result.output
    with open(out, newline='') as handle:
        rows = list(csv.DictReader(handle))
    assert [row['workers'] for row in rows] == ['1', '2']
    assert list(rows[0]) == list(cli_module.BENCH_COLUMNS)
    assert int(rows[1]['events']) == 200 + 5


def test_bench_sweeps_sync_ratio_and_heartbeat_period(runner, tmp_path):
    out = tmp_path / 'sweep.csv'
    result = runner.invoke(cli, ['bench', '--workers', '2', '--events', '100', '--sync-ratio', '5,20',
                                 '--heartbeat-period', '2,50', '--backend', 'thread', '--out', str(out)])
    assert result.exit_code == 0, result.output
    with open(out, newline='') as handle:
        rows = list(csv.DictReader(handle))
    assert [(row['sync_ratio'], row['heartbeat_period']) for row in rows] == \
        [('5', '2'), ('5', '50'), ('20', '2'), ('20', '50')]
    for row in rows:
        assert row['depth'] == '2'
        assert int(row['non_leaf_events']) == 50 // int(row['sync_ratio'])
        assert int(row['leaf_events']) + int(row['non_leaf_events']) == int(row['events'])


def test_bench_rejects_bad_worker_list(runner):
    result = runner.invoke(cli, ['bench', '--workers', 'one,two'])
    assert result.exit_code == 2
