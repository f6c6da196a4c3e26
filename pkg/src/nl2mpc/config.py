"""Layered application configuration.

Settings resolve with documented precedence: explicit overrides (CLI flags)
beat environment variables, which beat a user config file, which beats the
packaged defaults.  Environment variables cover the completion client only:
NL2MPC_ENDPOINT, NL2MPC_MODEL, NL2MPC_API_KEY, NL2MPC_TEMPERATURE.

Embodiment physics parameters live in their own versioned YAML files and
load into the frozen config dataclasses; a version mismatch is an error,
not a silent default.
"""

from __future__ import annotations

import os
from importlib import resources

import yaml

from nl2mpc.errors import ConfigError, VersionError
from nl2mpc.manipulator.config import ManipulatorConfig
from nl2mpc.planning.config import IlqgConfig, PlannerConfig, PredictiveSamplingConfig
from nl2mpc.quadruped.config import QuadrupedConfig

CONFIG_VERSION = 1

_ENV_PATHS = {
    "NL2MPC_COMPLETIONS_URL": ("completion", "endpoint"),
    "NL2MPC_COMPLETIONS_MODEL": ("completion", "model"),
    "NL2MPC_API_KEY": ("completion", "api_key"),
    "NL2MPC_TEMPERATURE": ("completion", "temperature"),
}


def _read_yaml(path) -> dict:
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping")
    return data


def _packaged(name: str):
    return resources.files("nl2mpc.configs") / name


def _deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def _set_path(doc: dict, path: tuple, value) -> None:
    node = doc
    for key in path[:-1]:
        node = node.setdefault(key, {})
    node[path[-1]] = value


def load_config(path=None, env=None, overrides=None) -> dict:
    """Resolve the application config document.

    `path` is an optional user YAML file, `env` a mapping (defaults to
    os.environ), `overrides` a partial document from CLI flags.
    """
    doc = _read_yaml(_packaged("default.yaml"))
    if doc.get("version") != CONFIG_VERSION:
        raise VersionError(
            f"packaged defaults have version {doc.get('version')}, "
            f"expected {CONFIG_VERSION}"
        )
    if path is not None:
        import pathlib

        p = pathlib.Path(path)
        if not p.exists():
            raise ConfigError(f"config file {p} does not exist")
        user = _read_yaml(p)
        version = user.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise VersionError(
                f"config file {p} has version {version}, expected {CONFIG_VERSION}"
            )
        doc = _deep_merge(doc, user)
    env = os.environ if env is None else env
    for var, target in _ENV_PATHS.items():
        if var in env and env[var] != "":
            value = env[var]
            if target[-1] == "temperature":
                try:
                    value = float(value)
                except ValueError:
                    raise ConfigError(f"{var} must be a number, got {value!r}") from None
            _set_path(doc, target, value)
    if overrides:
        doc = _deep_merge(doc, overrides)
    return doc


def planner_from_doc(doc: dict) -> PlannerConfig:
    """PlannerConfig from a config sub-document (missing keys keep defaults)."""
    kwargs = dict(doc)
    ps = kwargs.pop("ps", None)
    ilqg = kwargs.pop("ilqg", None)
    if ps is not None:
        kwargs["ps"] = PredictiveSamplingConfig(**ps)
    if ilqg is not None:
        kwargs["ilqg"] = IlqgConfig(**ilqg)
    try:
        return PlannerConfig(**kwargs)
    except TypeError as e:
        raise ConfigError(f"bad planner config {doc!r}: {e}") from None


def default_planner_config(embodiment: str, doc: dict | None = None) -> PlannerConfig:
    doc = doc or load_config()
    try:
        sub = doc[embodiment]["planner"]
    except KeyError:
        raise ConfigError(f"no planner defaults for embodiment {embodiment!r}") from None
    return planner_from_doc(sub)


def default_scene_name(embodiment: str, doc: dict | None = None) -> str:
    doc = doc or load_config()
    try:
        return doc[embodiment]["scene"]
    except KeyError:
        raise ConfigError(f"no scene default for embodiment {embodiment!r}") from None


def _embodiment_from_yaml(name: str, cls):
    data = _read_yaml(_packaged(f"{name}.yaml"))
    version = data.get("version")
    if version != cls().version:
        raise VersionError(
            f"{name}.yaml has version {version}, expected {cls().version}"
        )
    for key, value in data.items():
        if isinstance(value, list):
            data[key] = tuple(value)
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigError(f"bad {name} config: {e}") from None


def quadruped_config() -> QuadrupedConfig:
    return _embodiment_from_yaml("quadruped", QuadrupedConfig)


def manipulator_config() -> ManipulatorConfig:
    return _embodiment_from_yaml("manipulator", ManipulatorConfig)


def embodiment_config(embodiment: str):
    if embodiment == "quadruped":
        return quadruped_config()
    if embodiment == "manipulator":
        return manipulator_config()
    raise ConfigError(f"unknown embodiment {embodiment!r}")
