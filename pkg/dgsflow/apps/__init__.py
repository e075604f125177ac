"""Registry of the shipped DGS applications."""
from dgsflow.apps import fraud, key_counter, page_view, value_barrier
from dgsflow.errors import ConfigError

APPS = {
    key_counter.NAME: key_counter,
    value_barrier.NAME: value_barrier,
    page_view.NAME: page_view,
    fraud.NAME: fraud,
}


def get_app(name):
    try:
        return APPS[name]
    except KeyError:
        raise ConfigError(f'unknown app {name!r}; choose from {", ".join(sorted(APPS))}', app=name)


def app_names():
    return sorted(APPS)
