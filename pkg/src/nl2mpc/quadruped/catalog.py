"""Quadruped residual catalog and feature extraction.

Feature names are flat scalars so that every residual is a pure function of
the feature mapping.  All residual functions broadcast over batched features.

Default term weights:

    torso height 1.0 | pitch 0.6 | roll 0.1 | x-y position 0.3 | heading 0.3
    forward velocity 0.1 | sideways velocity 0.1 | turning speed 0.1
    foot x 1.0 | foot y 1.0 | foot z 2.0 (static and stepping alike)
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from nl2mpc.errors import ValidationError
from nl2mpc.mathutil import wrap_angle
from nl2mpc.quadruped.config import FOOT_HOME, FOOT_NAMES
from nl2mpc.quadruped.gait import FootGaitParams, duty_cycled_height, swing_target_offset
from nl2mpc.rewards.registry import register_residual

WEIGHTS = {
    "torso_height": 1.0,
    "torso_pitch": 0.6,
    "torso_roll": 0.1,
    "torso_xy": 0.3,
    "torso_heading": 0.3,
    "forward_velocity": 0.1,
    "sideways_velocity": 0.1,
    "yaw_speed": 0.1,
    "foot_x": 1.0,
    "foot_y": 1.0,
    "foot_z": 2.0,
}


def _stack(*cols):
    return np.stack([np.asarray(c, dtype=float) for c in cols], axis=-1)


def _check_foot(params: Mapping) -> None:
    if params["foot"] not in FOOT_NAMES:
        raise ValidationError(
            f"unknown foot '{params['foot']}'; expected one of {FOOT_NAMES}"
        )


def _com_height(f, p):
    return _stack(f["pos_z"] - p["target"])


def _base_pitch(f, p):
    return _stack(wrap_angle(f["pitch"] - p["target"]))


def _base_roll(f, p):
    return _stack(wrap_angle(f["roll"] - p["target"]))


def _com_xy(f, p):
    tx, ty = p["target"]
    return _stack(f["pos_x"] - tx, f["pos_y"] - ty)


def _base_heading(f, p):
    return _stack(wrap_angle(f["yaw"] - p["target"]))


def _forward_velocity(f, p):
    return _stack(f["vel_x"] - p["target"])


def _sideways_velocity(f, p):
    return _stack(f["vel_y"] - p["target"])


def _yaw_speed(f, p):
    return _stack(f["yaw_rate"] - p["target"])


def _foot_x(f, p):
    # target is the commanded forward extension relative to the stance home
    return _stack(f[f"foot_{p['foot']}_x"] - p["home"] - p["target"])


def _foot_y(f, p):
    # inward displacement: toward the body midline from the stance home
    d = (p["home"] - f[f"foot_{p['foot']}_y"]) * p["inward_sign"]
    return _stack(d - p["target"])


def _foot_z(f, p):
    return _stack(f[f"foot_{p['foot']}_z"] - p["target"])


def _gait(p) -> FootGaitParams:
    return FootGaitParams(
        amplitude=p["amplitude"],
        frequency=p["frequency"],
        phase_offset=p["phase_offset"],
        air_ratio=p["air_ratio"],
        swing_forward_back=p.get("swing", 0.0),
    )


def _foot_gait_z(f, p):
    target = duty_cycled_height(f["time"], _gait(p))
    return _stack(f[f"foot_{p['foot']}_z"] - target)


def _foot_gait_x(f, p):
    target = swing_target_offset(f["time"], _gait(p))
    return _stack(f[f"foot_{p['foot']}_x"] - p["home"] - target)


def _check_gait(p: Mapping) -> None:
    _check_foot(p)
    # constructing the params validates the ranges
    _gait(p)


register_residual("com_height", _com_height, ("target",))
register_residual("base_pitch", _base_pitch, ("target",))
register_residual("base_roll", _base_roll, ("target",))
register_residual("com_xy", _com_xy, ("target",))
register_residual("base_heading", _base_heading, ("target",))
register_residual("forward_velocity", _forward_velocity, ("target",))
register_residual("sideways_velocity", _sideways_velocity, ("target",))
register_residual("yaw_speed", _yaw_speed, ("target",))
register_residual("foot_x", _foot_x, ("foot", "target", "home"), _check_foot)
register_residual("foot_y", _foot_y, ("foot", "target", "home", "inward_sign"), _check_foot)
register_residual("foot_z", _foot_z, ("foot", "target"), _check_foot)
register_residual(
    "foot_gait_z",
    _foot_gait_z,
    ("foot", "amplitude", "frequency", "phase_offset", "air_ratio"),
    _check_gait,
)
register_residual(
    "foot_gait_x",
    _foot_gait_x,
    ("foot", "home", "amplitude", "frequency", "phase_offset", "air_ratio", "swing"),
    _check_gait,
)


def foot_home(foot: str) -> tuple[float, float]:
    return FOOT_HOME[foot]


def inward_sign(foot: str) -> float:
    """+1 when inward motion decreases y (left feet), -1 otherwise."""
    return 1.0 if FOOT_HOME[foot][1] > 0 else -1.0
