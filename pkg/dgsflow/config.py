"""Service settings (Flask app.config) and the run/check knobs shared by the CLI and the API."""
import os
from dataclasses import asdict, dataclass

from dgsflow.errors import ConfigError

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
DEFAULT_DB_PATH = os.path.join(BASE_DIR, 'database', 'dgsflow.db')

MODES = ('simulated', 'concurrent')
BACKENDS = ('thread', 'process')
PLAN_SOURCES = ('auto', 'single', 'random')


class Config:
    SECRET_KEY = os.environ.get('SECRET_KEY', 'dgsflow-dev')
    SQLALCHEMY_DATABASE_URI = os.environ.get('DATABASE_URL', f'sqlite:///{DEFAULT_DB_PATH}')
    SQLALCHEMY_TRACK_MODIFICATIONS = False
    PORT = int(os.environ.get('PORT', 5000))
    # Upper bounds for work accepted over HTTP
    MAX_API_EVENTS = int(os.environ.get('DGS_MAX_API_EVENTS', 20000))
    MAX_API_CASES = int(os.environ.get('DGS_MAX_API_CASES', 5000))


@dataclass
class RunConfig:
    app: str = 'value-barrier'
    streams: int = 2
    events_per_stream: int = 1000
    sync_ratio: int = 10000
    heartbeat_period: int = 100
    seed: int = 0
    mode: str = 'simulated'
    workers: int = 0
    backend: str = 'thread'
    plan: str = 'auto'
    trace: str = None
    out: str = None
    checkpoints: str = None
    checkpoint_every: int = 1
    idle_timeout: float = 30.0

    def validate(self):
        for name in ('streams', 'events_per_stream', 'sync_ratio', 'heartbeat_period', 'checkpoint_every'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f'{name} must be a positive integer, got {value!r}', field=name)
        if self.seed < 0:
            raise ConfigError(f'seed must be non-negative, got {self.seed}', field='seed')
        if self.mode not in MODES:
            raise ConfigError(f'mode must be one of {", ".join(MODES)}', field='mode')
        if self.backend not in BACKENDS:
            raise ConfigError(f'backend must be one of {", ".join(BACKENDS)}', field='backend')
        if self.workers < 0:
            raise ConfigError('workers must be non-negative', field='workers')
        if self.mode == 'simulated' and self.backend != 'thread':
            raise ConfigError('backend only applies to concurrent mode', field='backend')
        if self.idle_timeout <= 0:
            raise ConfigError('idle_timeout must be positive', field='idle_timeout')
        if self.plan not in PLAN_SOURCES and not os.path.isfile(self.plan):
            raise ConfigError(f'plan must be auto, single, random or an existing file: {self.plan}', field='plan')
        return self

    def to_dict(self):
        return asdict(self)


@dataclass
class CheckConfig:
    cases: int = 1000
    seed: int = 0
    max_rejections: int = 1000
    max_state_events: int = 12

    def validate(self):
        if self.cases < 0:
            raise ConfigError('cases must be non-negative', field='cases')
        if self.max_rejections < 1 or self.max_state_events < 0:
            raise ConfigError('sampling bounds must be positive', field='max_rejections')
        return self
