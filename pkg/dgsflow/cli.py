"""Command-line front end: gen, check, plan, run, bench and serve."""
import csv
import functools
import itertools
import json
import logging
import os
import sys

import click

from dgsflow.apps import app_names, get_app
from dgsflow.apps.generators import generate_input
from dgsflow.config import Config, RunConfig
from dgsflow.encoding import to_jsonable
from dgsflow.errors import ConsistencyFailure, DgsError
from dgsflow.optimizer import RateSpec, comm_cost, optimize
from dgsflow.pipeline import check_app, execute
from dgsflow.streams import read_trace, write_trace

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ('workers', 'sync_ratio', 'heartbeat_period', 'depth', 'events', 'seconds', 'events_per_sec',
                 'p10', 'p50', 'p90', 'root_joins', 'leaf_events', 'non_leaf_events')


def _ensure_parent(path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def _write_jsonl(path, rows):
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True) + '\n')


def handle_errors(command):
    """Map library errors to exit codes and a one-line message plus JSON details on stderr."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except DgsError as e:
            click.echo(f'❌ {e.error_type}: {e.message}', err=True)
            if e.details:
                click.echo(json.dumps(to_jsonable(e.to_dict()), indent=2, sort_keys=True), err=True)
            sys.exit(e.exit_code)
        except OSError as e:
            click.echo(f'❌ {e}', err=True)
            sys.exit(1)
    return wrapper


def workload_options(command):
    for option in reversed([
        click.option('--app', type=click.Choice(app_names()), default='value-barrier', show_default=True),
        click.option('--streams', type=int, default=2, show_default=True, help='parallel input streams (k)'),
        click.option('--events', 'events_per_stream', type=int, default=1000, show_default=True,
                     help='events per parallel stream'),
        click.option('--sync-ratio', type=int, default=10000, show_default=True,
                     help='parallel events per synchronizing event'),
        click.option('--heartbeat-period', type=int, default=100, show_default=True),
        click.option('--seed', type=int, default=0, show_default=True),
    ]):
        command = option(command)
    return command


@click.group()
@click.option('--log-level', default='WARNING', show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
def cli(log_level):
    """Dependency-guided synchronization for stream processing."""
    logging.basicConfig(level=getattr(logging, log_level.upper()),
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


@cli.command()
@workload_options
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='trace JSONL to write')
@handle_errors
def gen(app, streams, events_per_stream, sync_ratio, heartbeat_period, seed, out):
    """Generate an input trace."""
    config = RunConfig(app=app, streams=streams, events_per_stream=events_per_stream, sync_ratio=sync_ratio,
                       heartbeat_period=heartbeat_period, seed=seed).validate()
    trace = generate_input(app, config)
    write_trace(out, trace)
    count = sum(len(s) for s in trace)
    click.echo(f'✅ Wrote {count} messages on {len(trace)} streams to {out}')


@cli.command()
@click.option('--app', type=click.Choice(app_names()), required=True)
@click.option('--cases', type=int, default=1000, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--streams', type=int, default=2, show_default=True)
@handle_errors
def check(app, cases, seed, streams):
    """Run the C1/C2/C3 consistency suite; exits 2 on any failure."""
    report = check_app(app, cases=cases, seed=seed, streams=streams)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if not report.ok:
        raise ConsistencyFailure(f'{len(report.failures)} consistency failure(s) in {app}')
    click.echo(f'✅ {app}: {report.total_cases} cases, no failures', err=True)


@cli.command()
@click.option('--app', type=click.Choice(app_names()), required=True)
@click.option('--rates', 'rates_path', required=True, type=click.Path(dir_okay=False),
              help='JSON {"itags": [{"tag", "stream", "rate", "location"}]}')
@click.option('--streams', type=int, default=None, help='parallel streams of the program (default: from rates)')
@click.option('--out', type=click.Path(dir_okay=False), help='write the plan JSON here')
@click.option('--dot', 'dot_path', type=click.Path(dir_okay=False), help='write the DOT rendering here')
@handle_errors
def plan(app, rates_path, streams, out, dot_path):
    """Synthesize a synchronization plan from itag rates."""
    rates = RateSpec.from_json_file(rates_path)
    if streams is None:
        streams = max(1, len({i.stream for i in rates.rates}) - 1)
    p = get_app(app).program(streams)
    result = optimize(p, rates.rates.keys(), rates)
    text = result.to_json()
    if out:
        _ensure_parent(out)
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text + '\n')
    if dot_path:
        _ensure_parent(dot_path)
        with open(dot_path, 'w', encoding='utf-8') as handle:
            handle.write(result.to_dot() + '\n')
    click.echo(text)
    click.echo(result.to_dot())
    click.echo(f'✅ {len(result.workers())} workers, communication cost {comm_cost(result, rates):g}', err=True)


@cli.command()
@workload_options
@click.option('--mode', type=click.Choice(['simulated', 'concurrent']), default='simulated', show_default=True)
@click.option('--workers', type=int, default=0, help='shorthand for --streams in generated workloads')
@click.option('--backend', type=click.Choice(['thread', 'process']), default='thread', show_default=True)
@click.option('--plan', 'plan_source', default='auto', show_default=True,
              help='auto, single, random, or a plan JSON file')
@click.option('--plan-file', type=click.Path(exists=True, dir_okay=False), help='plan JSON (overrides --plan)')
@click.option('--trace', type=click.Path(exists=True, dir_okay=False), help='input trace (default: generate)')
@click.option('--out', type=click.Path(dir_okay=False), help='outputs JSONL')
@click.option('--checkpoints', type=click.Path(dir_okay=False), help='checkpoints JSONL')
@click.option('--checkpoint-every', type=int, default=1, show_default=True)
@click.option('--stats', 'stats_path', type=click.Path(dir_okay=False), help='stats JSON')
@click.option('--idle-timeout', type=float, default=30.0, show_default=True)
@handle_errors
def run(app, streams, events_per_stream, sync_ratio, heartbeat_period, seed, mode, workers, backend,
        plan_source, plan_file, trace, out, checkpoints, checkpoint_every, stats_path, idle_timeout):
    """Execute an application over a trace with a synchronization plan."""
    config = RunConfig(
        app=app, streams=workers or streams, events_per_stream=events_per_stream, sync_ratio=sync_ratio,
        heartbeat_period=heartbeat_period, seed=seed, mode=mode, workers=workers,
        backend=backend if mode == 'concurrent' else 'thread', plan=plan_file or plan_source,
        trace=trace, out=out, checkpoints=checkpoints, checkpoint_every=checkpoint_every,
        idle_timeout=idle_timeout,
    ).validate()
    streams_in = read_trace(trace) if trace else None
    used_plan, result = execute(config, streams_in)

    if out:
        _write_jsonl(out, (to_jsonable(o) for o in result.outputs))
    if checkpoints:
        _write_jsonl(checkpoints, (c.to_dict() for c in result.checkpoints))
    if stats_path:
        _ensure_parent(stats_path)
        with open(stats_path, 'w', encoding='utf-8') as handle:
            json.dump({'plan': used_plan.to_dict(), 'stats': result.stats.to_dict()}, handle, indent=2,
                      sort_keys=True)
    if not out:
        for output in result.outputs:
            click.echo(json.dumps(to_jsonable(output), sort_keys=True))
    stats = result.stats
    click.echo(f'✅ {stats.events} events, {stats.outputs} outputs, {len(stats.workers)} workers, '
               f'{stats.root_joins} root joins in {stats.wall_time:.3f}s', err=True)


def _int_list(value, hint):
    try:
        items = [int(c) for c in value.split(',') if c.strip()]
    except ValueError:
        raise click.BadParameter(f'not a list of integers: {value}', param_hint=hint)
    if not items:
        raise click.BadParameter('empty list', param_hint=hint)
    return items


@cli.command()
@click.option('--app', type=click.Choice(app_names()), default='value-barrier', show_default=True)
@click.option('--workers', 'worker_counts', default='1,2,4', show_default=True,
              help='comma-separated parallel stream counts')
@click.option('--events', 'total_events', type=int, default=100000, show_default=True,
              help='total parallel events, split across streams')
@click.option('--sync-ratio', 'sync_ratios', default='10000', show_default=True,
              help='comma-separated parallel events per synchronizing event')
@click.option('--heartbeat-period', 'heartbeat_periods', default='100', show_default=True,
              help='comma-separated heartbeat periods')
@click.option('--plan', 'plan_source', type=click.Choice(['auto', 'single', 'random']), default='auto',
              show_default=True, help='random plans vary the tree depth')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--backend', type=click.Choice(['thread', 'process']), default='process', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), help='CSV file (default: stdout)')
@handle_errors
def bench(app, worker_counts, total_events, sync_ratios, heartbeat_periods, plan_source, seed, backend, out):
    """Sweep worker counts, sync ratios and heartbeat periods; report throughput and latency."""
    counts = _int_list(worker_counts, '--workers')
    ratios = _int_list(sync_ratios, '--sync-ratio')
    periods = _int_list(heartbeat_periods, '--heartbeat-period')
    rows = []
    for count, ratio, period in itertools.product(counts, ratios, periods):
        config = RunConfig(app=app, streams=count, events_per_stream=max(1, total_events // count),
                           sync_ratio=ratio, heartbeat_period=period, seed=seed, plan=plan_source,
                           mode='concurrent', workers=count, backend=backend).validate()
        _, result = execute(config)
        stats = result.stats
        rows.append({
            'workers': count,
            'sync_ratio': ratio,
            'heartbeat_period': period,
            'depth': stats.depth,
            'events': stats.events,
            'seconds': round(stats.wall_time, 6),
            'events_per_sec': round(stats.throughput, 2),
            'p10': stats.latency.get('p10'),
            'p50': stats.latency.get('p50'),
            'p90': stats.latency.get('p90'),
            'root_joins': stats.root_joins,
            'leaf_events': stats.leaf_events,
            'non_leaf_events': stats.non_leaf_events,
        })
        click.echo(f'🚀 {count} stream(s), ratio {ratio}, heartbeat {period}: '
                   f'{stats.throughput:,.0f} events/s', err=True)

    handle = open(out, 'w', newline='', encoding='utf-8') if out else sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out:
            handle.close()


@cli.command()
@click.option('--host', default='0.0.0.0', show_default=True)
@click.option('--port', type=int, default=None, help='defaults to $PORT or 5000')
def serve(host, port):
    """Run the HTTP service."""
    from dgsflow.app import create_app

    port = port or Config.PORT
    click.echo(f'🚀 Starting dgsflow service on port {port}')
    create_app().run(host=host, port=port, debug=False)


def main():
    cli(prog_name='dgsflow')


if __name__ == '__main__':
    main()
