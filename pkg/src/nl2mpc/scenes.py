"""Named starting scenes, shared by sessions and the task suite."""

from __future__ import annotations

import math

import numpy as np

from nl2mpc.errors import ValidationError

SCENES = {
    "quadruped": ("flat", "flat_facing_north"),
    "manipulator": ("tabletop",),
}


def validate_scene(embodiment: str, scene: str) -> None:
    if embodiment not in SCENES:
        raise ValidationError(
            f"unknown embodiment {embodiment!r}, expected one of {tuple(SCENES)}"
        )
    if scene not in SCENES[embodiment]:
        raise ValidationError(
            f"scene {scene!r} is not valid for {embodiment}; "
            f"expected one of {SCENES[embodiment]}"
        )


def scene_initial_state(embodiment: str, scene: str, cfg=None) -> np.ndarray:
    """Initial state vector for a named scene."""
    validate_scene(embodiment, scene)
    if embodiment == "quadruped":
        from nl2mpc.quadruped.config import QuadrupedConfig
        from nl2mpc.quadruped.dynamics import nominal_stand

        yaw = math.pi / 2.0 if scene == "flat_facing_north" else 0.0
        return nominal_stand(cfg or QuadrupedConfig(), yaw=yaw).to_vector()
    from nl2mpc.manipulator.dynamics import initial_state
    from nl2mpc.manipulator.scene import default_scene

    return initial_state(default_scene()).to_vector()


def manipulator_scene(scene: str):
    """The Scene object behind a manipulator scene name."""
    validate_scene("manipulator", scene)
    from nl2mpc.manipulator.scene import default_scene

    return default_scene()
