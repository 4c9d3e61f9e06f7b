import pytest

from domain.errors import ConfigError
from domain.types import FACTORS
from settings import (API_KEY_ENV, api_key, derive_seed, load_config, save_config,
                      with_overrides)


def _write(tmp_path, text):
    path = tmp_path / "run.yaml"
    path.write_text(text)
    return str(path)


def test_seed_is_mandatory():
    with pytest.raises(ConfigError, match="seed is mandatory"):
        load_config()


def test_defaults_with_seed_flag():
    cfg = load_config(overrides={"seed": 4, "workers": None})
    assert cfg.seed == 4
    assert cfg.agent.variant == "sim"
    assert cfg.agent.factor_mask == list(FACTORS)
    assert cfg.agent.thoughts_on
    assert cfg.data.split == [0.8, 0.1, 0.1]
    assert cfg.worker_count() >= 1


def test_file_is_layered_over_defaults_and_flags_over_file(tmp_path):
    path = _write(tmp_path, "seed: 3\nagent:\n  variant: sum\n  max_steps: 6\nenv:\n  page_size: 5\n")
    cfg = load_config(path)
    assert (cfg.seed, cfg.agent.variant, cfg.agent.max_steps) == (3, "sum", 6)
    assert cfg.agent.boredom_threshold == 0.8
    assert cfg.env.mf.dim == 32
    flagged = load_config(path, {"seed": 9, "agent.variant": "sim", "env.strategy": "random"})
    assert (flagged.seed, flagged.agent.variant, flagged.env.strategy) == (9, "sim", "random")
    assert flagged.env.page_size == 5


def test_unknown_keys_are_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown config keys under agent"):
        load_config(_write(tmp_path, "seed: 1\nagent:\n  temperament: calm\n"))
    with pytest.raises(ConfigError, match="unknown config keys under root"):
        load_config(_write(tmp_path, "seed: 1\nmystery: 2\n"))


def test_invalid_yaml_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "seed: [1\n"))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.yaml"))


@pytest.mark.parametrize("key,value", [
    ("agent.variant", "full"),
    ("backend.kind", "grpc"),
    ("agent.factor_mask", ["c_t", "c_x"]),
    ("agent.max_steps", 0),
    ("env.page_size", 0),
    ("env.mode", "arcade"),
    ("data.split", [0.5, 0.5]),
    ("data.split", [0.6, 0.3, 0.3]),
    ("backend.classify_rule", "fuzzy"),
])
def test_invalid_values_are_rejected(key, value):
    with pytest.raises(ConfigError):
        load_config(overrides={"seed": 1, key: value})


def test_with_overrides_copies_and_rechecks():
    cfg = load_config(overrides={"seed": 1})
    lean = with_overrides(cfg, {"lifesim.enabled": False, "agent.factor_mask": []})
    assert not lean.lifesim.enabled and lean.agent.factor_mask == []
    assert cfg.lifesim.enabled and cfg.agent.factor_mask == list(FACTORS)
    with pytest.raises(ConfigError):
        with_overrides(cfg, {"agent.variant": "other"})


def test_saved_config_reloads_identically(tmp_path):
    cfg = load_config(overrides={"seed": 12, "n_agents": 3, "agent.variant": "sum"})
    path = str(tmp_path / "out" / "run_config.yaml")
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(7, "agent", "1") == derive_seed(7, "agent", "1")
    seeds = {derive_seed(7, "agent", n) for n in range(50)}
    assert len(seeds) == 50
    assert derive_seed(7, "agent", "1") != derive_seed(8, "agent", "1")
    assert 0 <= derive_seed(7) < 16 ** 12


def test_api_key_comes_from_environment(monkeypatch):
    monkeypatch.setenv(API_KEY_ENV, "secret")
    assert api_key() == "secret"
