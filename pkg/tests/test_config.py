"""Config resolution: defaults, file, environment, explicit overrides."""

from __future__ import annotations

import pytest

from nl2mpc.config import (
    default_planner_config,
    default_scene_name,
    embodiment_config,
    load_config,
    planner_from_doc,
)
from nl2mpc.errors import ConfigError, VersionError
from nl2mpc.manipulator.config import ManipulatorConfig
from nl2mpc.quadruped.config import QuadrupedConfig


def test_defaults_load():
    doc = load_config(env={})
    assert doc["version"] == 1
    assert doc["seed"] == 0
    assert doc["quadruped"]["planner"]["backend"] == "ilqg"
    assert doc["manipulator"]["planner"]["backend"] == "ps"
    assert doc["completion"]["endpoint"] is None


def test_file_overrides_defaults(tmp_path):
    path = tmp_path / "user.yaml"
    path.write_text("version: 1\nseed: 42\nquadruped:\n  planner:\n    horizon: 24\n")
    doc = load_config(path=path, env={})
    assert doc["seed"] == 42
    assert doc["quadruped"]["planner"]["horizon"] == 24
    # untouched keys keep their defaults
    assert doc["quadruped"]["planner"]["backend"] == "ilqg"


def test_env_overrides_file(tmp_path):
    path = tmp_path / "user.yaml"
    path.write_text("version: 1\ncompletion:\n  endpoint: http://file.example\n")
    doc = load_config(path=path, env={"NL2MPC_COMPLETIONS_URL": "http://env.example"})
    assert doc["completion"]["endpoint"] == "http://env.example"


def test_explicit_overrides_beat_env():
    doc = load_config(
        env={"NL2MPC_COMPLETIONS_URL": "http://env.example"},
        overrides={"completion": {"endpoint": "http://flag.example"}},
    )
    assert doc["completion"]["endpoint"] == "http://flag.example"


def test_non_numeric_temperature_env_is_a_config_error():
    with pytest.raises(ConfigError):
        load_config(env={"NL2MPC_TEMPERATURE": "warm"})


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(path=tmp_path / "absent.yaml", env={})


def test_wrong_version_is_a_version_error(tmp_path):
    path = tmp_path / "user.yaml"
    path.write_text("version: 99\n")
    with pytest.raises(VersionError):
        load_config(path=path, env={})


def test_planner_round_trips_through_doc():
    import dataclasses

    cfg = default_planner_config("manipulator")
    assert cfg.backend == "ps"
    again = planner_from_doc(dataclasses.asdict(cfg))
    assert again == cfg


def test_default_scenes():
    doc = load_config(env={})
    assert default_scene_name("quadruped", doc) == "flat"
    assert default_scene_name("manipulator", doc) == "tabletop"


def test_packaged_embodiment_configs_match_code_defaults():
    assert embodiment_config("quadruped") == QuadrupedConfig()
    assert embodiment_config("manipulator") == ManipulatorConfig()
