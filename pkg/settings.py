#!/usr/bin/env python3
"""Run configuration: bundled defaults < config file < command-line flags."""

import copy
import hashlib
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from domain.errors import ConfigError
from domain.types import FACTORS

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs", "default.yaml")
API_KEY_ENV = "CONTEXTSIM_API_KEY"


@dataclass
class DataConfig:
    interactions: Optional[str] = None
    delimiter: str = "::"
    catalog: Optional[str] = None
    catalog_delimiter: str = "::"
    users: Optional[str] = None
    sessions: Optional[str] = None
    rankings: Optional[str] = None
    min_interactions: int = 20
    split: List[float] = field(default_factory=lambda: [0.8, 0.1, 0.1])


@dataclass
class BackendConfig:
    kind: str = "scripted"
    base_url: str = "http://localhost:8000/v1"
    path: str = "/chat/completions"
    model: str = "contextsim-policy"
    timeout: float = 60.0
    max_attempts: int = 3
    backoff: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    max_in_flight: int = 8
    temperature: float = 0.7
    max_tokens: int = 512
    classify_rule: str = "membership"


@dataclass
class AgentConfig:
    variant: str = "sim"
    max_steps: int = 20
    factor_mask: List[str] = field(default_factory=lambda: list(FACTORS))
    thought_mode: str = "on"
    boredom_threshold: float = 0.8
    fatigue_step: float = 0.05
    boredom_step: float = 0.15
    sessions_per_agent: int = 3

    @property
    def thoughts_on(self) -> bool:
        return str(self.thought_mode).lower() in ("on", "true", "1")


@dataclass
class MemoryConfig:
    retrieval_weight: float = 0.7
    evidence_k: int = 5


@dataclass
class LifesimConfig:
    enabled: bool = True
    horizon_days: int = 7
    summary_days: int = 30
    base_engagement: Dict[str, float] = field(default_factory=lambda: {
        "sleep": 0.0, "work": 0.05, "commute": 0.2, "meal": 0.15,
        "chores": 0.05, "rest": 0.25, "social": 0.1, "leisure": 0.3})
    habit_multiplier: Dict[str, float] = field(default_factory=lambda: {
        "low": 0.5, "medium": 1.0, "high": 1.5})
    templates: Optional[str] = None


@dataclass
class MFConfig:
    dim: int = 32
    learning_rate: float = 0.005
    reg: float = 0.02
    epochs: int = 30


@dataclass
class EnvConfig:
    mode: str = "recommendation"
    page_size: int = 10
    strategy: str = "popularity"
    like_threshold: int = 4
    mf: MFConfig = field(default_factory=MFConfig)


@dataclass
class PersonaConfig:
    candidates: int = 5
    history_sample: int = 30
    holdout: float = 0.3


@dataclass
class ThoughtsConfig:
    cap: int = 50
    ta_page_size: int = 4


@dataclass
class ExperimentsConfig:
    m_values: List[int] = field(default_factory=lambda: [1, 3, 9])
    items_per_agent: int = 20
    bootstrap: int = 1000
    matthew_rounds: int = 10
    matthew_seeds: int = 20
    boost_rounds: int = 2
    target_item: Optional[str] = None
    brand: Optional[str] = None
    fictitious_brand: Optional[str] = None
    ab_real: Optional[str] = None


@dataclass
class RunConfig:
    """Fully resolved configuration of one run."""
    seed: int
    out_dir: str = "runs/default"
    workers: Optional[int] = None
    n_agents: int = 20
    data: DataConfig = field(default_factory=DataConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    memory: MemoryConfig = field(default_factory=MemoryConfig)
    lifesim: LifesimConfig = field(default_factory=LifesimConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    persona: PersonaConfig = field(default_factory=PersonaConfig)
    thoughts: ThoughtsConfig = field(default_factory=ThoughtsConfig)
    experiments: ExperimentsConfig = field(default_factory=ExperimentsConfig)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def worker_count(self) -> int:
        return self.workers or os.cpu_count() or 1

    def require_path(self, key: str) -> str:
        """Return ``data.<key>`` and fail unless the file exists."""
        path = getattr(self.data, key)
        if not path:
            raise ConfigError(f"data.{key} is not set")
        if not os.path.exists(path):
            raise ConfigError(f"data.{key} does not exist: {path}")
        return path


def _build(cls, data: Dict[str, Any], prefix: str = ""):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'config'} must be a mapping")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys under {prefix or 'root'}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = known[name]
        default = f.default_factory() if callable(f.default_factory) else f.default
        if is_dataclass(default):
            kwargs[name] = _build(type(default), value or {}, f"{prefix}{name}.")
        else:
            kwargs[name] = value
    return cls(**kwargs)


def _merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _set_dotted(tree: Dict[str, Any], dotted: str, value: Any):
    node = tree
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def _read_yaml(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Resolve the run configuration.

    Args:
        path: optional YAML file layered over the bundled defaults
        overrides: dotted keys (``"agent.variant"``) from command-line flags;
            ``None`` values are ignored

    Returns:
        RunConfig
    """
    tree = _read_yaml(DEFAULT_CONFIG) if os.path.exists(DEFAULT_CONFIG) else {}
    if path:
        tree = _merge(tree, _read_yaml(path))
    for dotted, value in (overrides or {}).items():
        if value is not None:
            _set_dotted(tree, dotted, value)
    if tree.get("seed") is None:
        raise ConfigError("seed is mandatory")
    cfg = _build(RunConfig, tree)
    _check(cfg)
    return cfg


def _check(cfg: RunConfig):
    if cfg.backend.kind not in ("scripted", "http"):
        raise ConfigError(f"backend.kind must be scripted or http, got {cfg.backend.kind!r}")
    if cfg.agent.variant not in ("sim", "sum"):
        raise ConfigError(f"agent.variant must be sim or sum, got {cfg.agent.variant!r}")
    bad = [f for f in cfg.agent.factor_mask if f not in FACTORS]
    if bad:
        raise ConfigError(f"unknown context factors: {', '.join(bad)}")
    if cfg.agent.max_steps < 1:
        raise ConfigError("agent.max_steps must be >= 1")
    if cfg.env.page_size < 1:
        raise ConfigError("env.page_size must be >= 1")
    if cfg.env.mode not in ("recommendation", "webshop"):
        raise ConfigError(f"env.mode must be recommendation or webshop, got {cfg.env.mode!r}")
    if len(cfg.data.split) != 3 or abs(sum(cfg.data.split) - 1.0) > 1e-9:
        raise ConfigError("data.split must be three fractions summing to 1")
    if cfg.backend.classify_rule not in ("membership", "overlap"):
        raise ConfigError("backend.classify_rule must be membership or overlap")


def save_config(cfg: RunConfig, path: str):
    """Write the resolved configuration (seed included) as YAML."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(cfg.to_dict(), f, sort_keys=True)


def derive_seed(root_seed: int, *names: Any) -> int:
    """Independent integer seed for the named sub-stream of ``root_seed``."""
    tag = "/".join([str(root_seed)] + [str(n) for n in names])
    return int(hashlib.sha256(tag.encode("utf-8")).hexdigest()[:12], 16)


def api_key() -> Optional[str]:
    """Credentials for the HTTP backend; a ``.env`` file is honoured."""
    load_dotenv()
    return os.environ.get(API_KEY_ENV)


def with_overrides(cfg: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """Copy of ``cfg`` with dotted-key overrides applied and re-checked."""
    tree = cfg.to_dict()
    for dotted, value in overrides.items():
        _set_dotted(tree, dotted, copy.deepcopy(value))
    updated = _build(RunConfig, tree)
    _check(updated)
    return updated
