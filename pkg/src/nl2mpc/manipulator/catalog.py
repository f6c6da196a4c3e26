"""Manipulator residual catalog.

Default term weights:

    pairwise distance |c1 - c2|   5
    z height          |cz - t|    5
    x-y position      |cxy - t|  10
    orientation       |o - t|    10
    joint fraction    |q - t|    10

The five action-regularizer residuals carry their own coefficients
(3, 1, 0.05, 0.1, 0.4) as term weights; see sim2real.py.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from nl2mpc.errors import ValidationError
from nl2mpc.manipulator.scene import JOINT_NAMES, OBJECT_NAMES, ORIENTABLE_NAMES, POINT_NAMES
from nl2mpc.mathutil import wrap_angle
from nl2mpc.rewards.registry import register_residual

WEIGHTS = {
    "distance": 5.0,
    "z_height": 5.0,
    "xy_position": 10.0,
    "orientation": 10.0,
    "joint_fraction": 10.0,
}


def _stack(*cols):
    return np.stack([np.asarray(c, dtype=float) for c in cols], axis=-1)


def _check_points(p: Mapping) -> None:
    for key in ("name_a", "name_b"):
        if p[key] not in POINT_NAMES:
            raise ValidationError(
                f"unknown point '{p[key]}'; expected one of {POINT_NAMES}"
            )


def _check_orientable(p: Mapping) -> None:
    if p["name"] not in ORIENTABLE_NAMES:
        raise ValidationError(
            f"'{p['name']}' has no orientation; expected one of {ORIENTABLE_NAMES}"
        )


def _check_object(p: Mapping) -> None:
    if p["name"] not in OBJECT_NAMES:
        raise ValidationError(
            f"'{p['name']}' is not a movable object; expected one of {OBJECT_NAMES}"
        )


def _check_joint(p: Mapping) -> None:
    if p["joint"] not in JOINT_NAMES:
        raise ValidationError(
            f"unknown joint '{p['joint']}'; expected one of {JOINT_NAMES}"
        )
    if not (0.0 <= p["target"] <= 1.0):
        raise ValidationError(
            f"joint fraction target must be in [0, 1], got {p['target']}"
        )


def _point_distance(f, p):
    a, b = p["name_a"], p["name_b"]
    return _stack(
        f[f"{a}_x"] - f[f"{b}_x"],
        f[f"{a}_y"] - f[f"{b}_y"],
        f[f"{a}_z"] - f[f"{b}_z"],
    )


def _x_rotation(f, p):
    return _stack(wrap_angle(f[f"rot_{p['name']}"] - p["target"]))


def _z_height(f, p):
    return _stack(f[f"{p['name']}_z"] - p["target"])


def _xy_position(f, p):
    tx, ty = p["target"]
    return _stack(f[f"{p['name']}_x"] - tx, f[f"{p['name']}_y"] - ty)


def _joint_fraction(f, p):
    return _stack(f[f"joint_{p['joint']}"] - p["target"])


register_residual("point_distance", _point_distance, ("name_a", "name_b"), _check_points)
register_residual("x_rotation", _x_rotation, ("name", "target"), _check_orientable)
register_residual("z_height", _z_height, ("name", "target"), _check_object)
register_residual("xy_position", _xy_position, ("name", "target"), _check_object)
register_residual("joint_fraction", _joint_fraction, ("joint", "target"), _check_joint)


# -- action regularizer residuals --------------------------------------------
#
# Case expressions gate on speed and proximity features; the `where` keeps
# everything batched.  Thresholds are fixed characteristics of the
# regularizer, not tunable targets.

EE_SPEED_LIMIT = 0.3
JOINT_SPEED_LIMIT = 0.7
NEAR_DIST = 0.1


def _s2r_ee_speed(f, p):
    fast = f["ee_speed"] > EE_SPEED_LIMIT
    return _stack(
        np.where(fast, f["ee_vel_x"], 0.0),
        np.where(fast, f["ee_vel_y"], 0.0),
        np.where(fast, f["ee_vel_z"], 0.0),
    )


def _s2r_joint_speed(f, p):
    fast = f["joint_speed"] > JOINT_SPEED_LIMIT
    return _stack(np.where(fast, f["joint_speed"], 0.0))


def _s2r_obj_speed(f, p):
    return _stack(f["near_obj_vel_x"], f["near_obj_vel_y"], f["near_obj_vel_z"])


def _s2r_speed_match(f, p):
    near = f["near_obj_dist"] < NEAR_DIST
    return _stack(
        np.where(near, f["ee_vel_x"] - f["near_obj_vel_x"], 0.0),
        np.where(near, f["ee_vel_y"] - f["near_obj_vel_y"], 0.0),
        np.where(near, f["ee_vel_z"] - f["near_obj_vel_z"], 0.0),
    )


def _s2r_gripper_posture(f, p):
    far = f["near_obj_dist"] > NEAR_DIST
    return _stack(np.where(far, f["gripper"] - 1.0, f["gripper"]))


register_residual("s2r_ee_speed", _s2r_ee_speed)
register_residual("s2r_joint_speed", _s2r_joint_speed)
register_residual("s2r_obj_speed", _s2r_obj_speed)
register_residual("s2r_speed_match", _s2r_speed_match)
register_residual("s2r_gripper_posture", _s2r_gripper_posture)
