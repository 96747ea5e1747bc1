from __future__ import annotations

import json

import pytest

from loceff.config import DEFAULT_SEED, Config, ConfigError, load_config


def test_defaults():
    cfg = load_config(env={})
    assert cfg == Config()
    assert cfg.seed == DEFAULT_SEED and cfg.step_bound == 10_000 and cfg.oracle_depth == 3


def test_precedence(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"seed": 1, "oracle_depth": 2}))
    assert load_config(p, env={}).seed == 1
    assert load_config(p, env={"LOCEFF_SEED": "5"}).seed == 5
    cfg = load_config(p, env={"LOCEFF_SEED": "5"}, seed=9)
    assert cfg.seed == 9 and cfg.oracle_depth == 2


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"depth": 2}))
    with pytest.raises(ConfigError):
        load_config(p, env={})


def test_invalid_values(tmp_path):
    with pytest.raises(ConfigError):
        Config(step_bound=0)
    with pytest.raises(ConfigError):
        Config(output="xml")
    with pytest.raises(ConfigError):
        load_config(env={"LOCEFF_SEED": "abc"})
    p = tmp_path / "c.json"
    p.write_text("{")
    with pytest.raises(ConfigError):
        load_config(p, env={})


def test_round_trip_dict():
    assert Config(**Config(seed=3).to_dict()) == Config(seed=3)
