"""Tiny registry for recommendation strategies."""

from domain.errors import ConfigError

STRATEGIES = {}


def register(strategy_cls):
    STRATEGIES[strategy_cls.name] = strategy_cls


def get(name):
    return STRATEGIES.get(name)


def create(name, catalog, **kwargs):
    """Instantiate the strategy registered as ``name``."""
    cls = get(name)
    if cls is None:
        raise ConfigError(f"unknown strategy {name!r}; known: {', '.join(sorted(STRATEGIES))}")
    return cls(catalog, **kwargs)


# Import built-ins so they self-register.
from strategies.random_strategy import STRATEGY as _random  # noqa: E402
from strategies.popularity import STRATEGY as _popularity  # noqa: E402
from strategies.mf_strategy import STRATEGY as _mf  # noqa: E402
from strategies.external import STRATEGY as _external  # noqa: E402