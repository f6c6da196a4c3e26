"""Instruction-facing reward API for the quadruped.

Each function is pure: it takes the current specification and returns a new
one with terms upserted or removed.  These are the callables a translated
script is allowed to invoke; the interpreter dispatches by name through
REWARD_API.  Angle arguments are radians (scripts convert degrees inline).
"""

from __future__ import annotations

import math

from nl2mpc.errors import ValidationError
from nl2mpc.quadruped.catalog import WEIGHTS, foot_home, inward_sign
from nl2mpc.quadruped.config import FOOT_ALIASES, FOOT_NAMES
from nl2mpc.rewards.core import Norm, ResidualTerm, RewardSpec, remove_term, upsert_term


def _require_number(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"argument '{name}' must be a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ValidationError(f"argument '{name}' must be finite, got {value!r}")
    return float(value)


def _require_pair(name: str, value) -> tuple[float, float]:
    if not isinstance(value, (tuple, list)) or len(value) != 2:
        raise ValidationError(
            f"argument '{name}' must be a pair (x, y), got {value!r}"
        )
    return (_require_number(f"{name}[0]", value[0]), _require_number(f"{name}[1]", value[1]))


def canonical_foot(name) -> str:
    if not isinstance(name, str) or name not in FOOT_ALIASES:
        raise ValidationError(
            f"unknown foot '{name}'; expected one of {sorted(FOOT_ALIASES)}"
        )
    return FOOT_ALIASES[name]


def _term(term_id: str, fn: str, params: dict, weight: float) -> ResidualTerm:
    return ResidualTerm(id=term_id, residual_fn=fn, params=params, weight=weight, norm=Norm())


def set_torso_targets(
    spec: RewardSpec,
    target_torso_height,
    target_torso_pitch,
    target_torso_roll,
    target_torso_location_xy,
    target_torso_velocity_xy,
    target_torso_heading,
    target_turning_speed,
) -> RewardSpec:
    height = _require_number("target_torso_height", target_torso_height)
    if height < 0.0:
        raise ValidationError(
            f"argument 'target_torso_height' must be >= 0, got {height}"
        )
    pitch = _require_number("target_torso_pitch", target_torso_pitch)
    roll = _require_number("target_torso_roll", target_torso_roll)

    if (target_torso_location_xy is None) == (target_torso_velocity_xy is None):
        raise ValidationError(
            "exactly one of target_torso_location_xy and target_torso_velocity_xy "
            "must be provided"
        )
    if (target_torso_heading is None) == (target_turning_speed is None):
        raise ValidationError(
            "exactly one of target_torso_heading and target_turning_speed "
            "must be provided"
        )

    spec = upsert_term(spec, _term("torso_height", "com_height", {"target": height}, WEIGHTS["torso_height"]))
    spec = upsert_term(spec, _term("torso_pitch", "base_pitch", {"target": pitch}, WEIGHTS["torso_pitch"]))
    spec = upsert_term(spec, _term("torso_roll", "base_roll", {"target": roll}, WEIGHTS["torso_roll"]))

    if target_torso_location_xy is not None:
        xy = _require_pair("target_torso_location_xy", target_torso_location_xy)
        spec = upsert_term(spec, _term("torso_xy", "com_xy", {"target": xy}, WEIGHTS["torso_xy"]))
        spec = remove_term(spec, "torso_velocity_x")
        spec = remove_term(spec, "torso_velocity_y")
    else:
        vx, vy = _require_pair("target_torso_velocity_xy", target_torso_velocity_xy)
        spec = upsert_term(spec, _term("torso_velocity_x", "forward_velocity", {"target": vx}, WEIGHTS["forward_velocity"]))
        spec = upsert_term(spec, _term("torso_velocity_y", "sideways_velocity", {"target": vy}, WEIGHTS["sideways_velocity"]))
        spec = remove_term(spec, "torso_xy")

    if target_torso_heading is not None:
        heading = _require_number("target_torso_heading", target_torso_heading)
        spec = upsert_term(spec, _term("torso_heading", "base_heading", {"target": heading}, WEIGHTS["torso_heading"]))
        spec = remove_term(spec, "torso_yaw_rate")
    else:
        speed = _require_number("target_turning_speed", target_turning_speed)
        spec = upsert_term(spec, _term("torso_yaw_rate", "yaw_speed", {"target": speed}, WEIGHTS["yaw_speed"]))
        spec = remove_term(spec, "torso_heading")

    return spec


def set_feet_pos_parameters(spec: RewardSpec, feet_name, lift_height, extend_forward, move_inward) -> RewardSpec:
    foot = canonical_foot(feet_name)
    home_x, home_y = foot_home(foot)

    if lift_height is None:
        spec = remove_term(spec, f"foot_z.{foot}")
    else:
        z = _require_number("lift_height", lift_height)
        if z < 0.0:
            raise ValidationError(f"argument 'lift_height' must be >= 0, got {z}")
        spec = upsert_term(spec, _term(f"foot_z.{foot}", "foot_z", {"foot": foot, "target": z}, WEIGHTS["foot_z"]))

    if extend_forward is None:
        spec = remove_term(spec, f"foot_x.{foot}")
    else:
        ext = _require_number("extend_forward", extend_forward)
        spec = upsert_term(spec, _term(f"foot_x.{foot}", "foot_x", {"foot": foot, "target": ext, "home": home_x}, WEIGHTS["foot_x"]))

    if move_inward is None:
        spec = remove_term(spec, f"foot_y.{foot}")
    else:
        inw = _require_number("move_inward", move_inward)
        spec = upsert_term(
            spec,
            _term(
                f"foot_y.{foot}",
                "foot_y",
                {"foot": foot, "target": inw, "home": home_y, "inward_sign": inward_sign(foot)},
                WEIGHTS["foot_y"],
            ),
        )

    return spec


def set_feet_stepping_parameters(
    spec: RewardSpec,
    feet_name,
    stepping_frequency,
    air_ratio,
    phase_offset,
    swing_up_down,
    swing_forward_back,
    should_activate,
) -> RewardSpec:
    foot = canonical_foot(feet_name)
    if not isinstance(should_activate, bool):
        raise ValidationError(
            f"argument 'should_activate' must be True or False, got {should_activate!r}"
        )

    if not should_activate:
        spec = remove_term(spec, f"foot_gait_z.{foot}")
        spec = remove_term(spec, f"foot_gait_x.{foot}")
        return spec

    freq = _require_number("stepping_frequency", stepping_frequency)
    air = _require_number("air_ratio", air_ratio)
    phase = _require_number("phase_offset", phase_offset)
    up = _require_number("swing_up_down", swing_up_down)
    fb = _require_number("swing_forward_back", swing_forward_back)
    if freq < 0.0:
        raise ValidationError(f"argument 'stepping_frequency' must be >= 0, got {freq}")
    if not (0.0 <= air <= 1.0):
        raise ValidationError(f"argument 'air_ratio' must be in [0, 1], got {air}")
    if not (0.0 <= phase <= 1.0):
        raise ValidationError(f"argument 'phase_offset' must be in [0, 1], got {phase}")
    if up < 0.0:
        raise ValidationError(f"argument 'swing_up_down' must be >= 0, got {up}")

    home_x, _ = foot_home(foot)
    gait = {"amplitude": up, "frequency": freq, "phase_offset": phase, "air_ratio": air}
    spec = upsert_term(
        spec,
        _term(f"foot_gait_z.{foot}", "foot_gait_z", {"foot": foot, **gait}, WEIGHTS["foot_z"]),
    )
    spec = upsert_term(
        spec,
        _term(
            f"foot_gait_x.{foot}",
            "foot_gait_x",
            {"foot": foot, "home": home_x, **gait, "swing": fb},
            WEIGHTS["foot_x"],
        ),
    )
    return spec


REWARD_API = {
    "set_torso_targets": set_torso_targets,
    "set_feet_pos_parameters": set_feet_pos_parameters,
    "set_feet_stepping_parameters": set_feet_stepping_parameters,
}
