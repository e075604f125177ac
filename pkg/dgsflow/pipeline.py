"""Glue shared by the CLI and the HTTP routes: resolve plans, run checks, execute configured runs."""
import logging
import random

from dgsflow.apps import get_app
from dgsflow.apps.generators import generate_input
from dgsflow.config import CheckConfig
from dgsflow.consistency import run_consistency_suite
from dgsflow.errors import ConfigError
from dgsflow.optimizer import RateSpec, optimize, random_plan
from dgsflow.plan import SyncPlan, single_worker_plan
from dgsflow.runtime import every_nth, run_plan
from dgsflow.streams import is_heartbeat

logger = logging.getLogger(__name__)


def observed_itags(streams):
    return frozenset(m.itag for stream in streams for m in stream if not is_heartbeat(m))


def load_plan(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return SyncPlan.from_json(handle.read())
    except OSError as e:
        raise ConfigError(f'cannot read plan file {path}: {e}')


def resolve_plan(p, source, streams, seed=0, max_depth=4):
    """Plan from a source name (auto, single, random) or a plan file path."""
    itags = observed_itags(streams)
    if source == 'single':
        return single_worker_plan(itags)
    if source == 'auto':
        return optimize(p, itags, RateSpec.from_streams(streams))
    if source == 'random':
        return random_plan(p, itags, random.Random(seed), max_depth)
    return load_plan(source)


def check_app(name, cases=1000, seed=0, streams=2, config=None):
    app = get_app(name)
    p = app.program(streams)
    config = (config or CheckConfig(cases=cases, seed=seed)).validate()
    return run_consistency_suite(p, event_gen=app.event_gen(p), n=config.cases, seed=config.seed, config=config)


def execute(config, streams=None, record_checkpoints=None):
    """Run a validated RunConfig; generates the input when `streams` is not given."""
    config.validate()
    p = get_app(config.app).program(config.streams)
    if streams is None:
        streams = generate_input(config.app, config)
    unknown = sorted({str(i.tag) for i in observed_itags(streams) if i.tag not in p.alphabet})
    if unknown:
        raise ConfigError(f'trace uses tags outside {p.name} with {config.streams} streams; pass --streams',
                          field='streams', tags=unknown)
    plan = resolve_plan(p, config.plan, streams, config.seed)
    if record_checkpoints is None:
        record_checkpoints = bool(config.checkpoints)
    checkpoint_pred = every_nth(config.checkpoint_every) if record_checkpoints else None
    result = run_plan(p, plan, streams, mode=config.mode, seed=config.seed, checkpoint_pred=checkpoint_pred,
                      backend=config.backend, idle_timeout=config.idle_timeout)
    return plan, result
