"""Instruction-facing reward API for the manipulator.

Pure (spec, args) -> spec functions, dispatched by name from translated
scripts.  Angle targets are radians.
"""

from __future__ import annotations

import math

from nl2mpc.errors import ValidationError
from nl2mpc.manipulator.catalog import WEIGHTS
from nl2mpc.manipulator.scene import JOINT_NAMES, OBJECT_NAMES, ORIENTABLE_NAMES, POINT_NAMES
from nl2mpc.manipulator.sim2real import add_sim2real_terms
from nl2mpc.rewards.core import Norm, ResidualTerm, RewardSpec, upsert_term


def _require_number(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"argument '{name}' must be a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ValidationError(f"argument '{name}' must be finite, got {value!r}")
    return float(value)


def _require_member(name: str, value, allowed) -> str:
    if not isinstance(value, str) or value not in allowed:
        raise ValidationError(
            f"argument '{name}' must be one of {sorted(allowed)}, got {value!r}"
        )
    return value


def set_l2_distance_reward(spec: RewardSpec, name_obj_A, name_obj_B) -> RewardSpec:
    a = _require_member("name_obj_A", name_obj_A, POINT_NAMES)
    b = _require_member("name_obj_B", name_obj_B, POINT_NAMES)
    if a == b:
        raise ValidationError(f"distance reward needs two distinct points, got '{a}' twice")
    term = ResidualTerm(
        id=f"dist.{a}.{b}",
        residual_fn="point_distance",
        params={"name_a": a, "name_b": b},
        weight=WEIGHTS["distance"],
        norm=Norm(),
    )
    return upsert_term(spec, term)


def set_obj_orientation_reward(spec: RewardSpec, name_obj, x_axis_rotation_radians) -> RewardSpec:
    name = _require_member("name_obj", name_obj, ORIENTABLE_NAMES)
    target = _require_number("x_axis_rotation_radians", x_axis_rotation_radians)
    term = ResidualTerm(
        id=f"orient.{name}",
        residual_fn="x_rotation",
        params={"name": name, "target": target},
        weight=WEIGHTS["orientation"],
        norm=Norm(),
    )
    return upsert_term(spec, term)


def set_obj_z_position_reward(spec: RewardSpec, name_obj, z_height) -> RewardSpec:
    name = _require_member("name_obj", name_obj, OBJECT_NAMES)
    target = _require_number("z_height", z_height)
    if target < 0.0:
        raise ValidationError(f"argument 'z_height' must be >= 0, got {target}")
    term = ResidualTerm(
        id=f"zpos.{name}",
        residual_fn="z_height",
        params={"name": name, "target": target},
        weight=WEIGHTS["z_height"],
        norm=Norm(),
    )
    return upsert_term(spec, term)


def set_joint_fraction_reward(spec: RewardSpec, name_joint, fraction) -> RewardSpec:
    joint = _require_member("name_joint", name_joint, JOINT_NAMES)
    target = _require_number("fraction", fraction)
    if not (0.0 <= target <= 1.0):
        raise ValidationError(f"argument 'fraction' must be in [0, 1], got {target}")
    term = ResidualTerm(
        id=f"joint.{joint}",
        residual_fn="joint_fraction",
        params={"joint": joint, "target": target},
        weight=WEIGHTS["joint_fraction"],
        norm=Norm(),
    )
    return upsert_term(spec, term)


def set_sim2real_regularization_reward(spec: RewardSpec) -> RewardSpec:
    return add_sim2real_terms(spec)


REWARD_API = {
    "set_l2_distance_reward": set_l2_distance_reward,
    "set_obj_orientation_reward": set_obj_orientation_reward,
    "set_obj_z_position_reward": set_obj_z_position_reward,
    "set_joint_fraction_reward": set_joint_fraction_reward,
    "set_sim2real_regularization_reward": set_sim2real_regularization_reward,
}
