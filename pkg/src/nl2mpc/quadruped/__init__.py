"""Quadruped surrogate: torso-centric kinematic model, gait targets, reward API."""

from nl2mpc.quadruped.config import FOOT_NAMES, QuadrupedConfig
from nl2mpc.quadruped.dynamics import QuadrupedState, quad_step
from nl2mpc.quadruped.gait import FootGaitParams, duty_cycled_height, foot_target_height
from nl2mpc.quadruped import catalog as _catalog  # registers residuals on import
from nl2mpc.quadruped.api import REWARD_API

__all__ = [
    "FOOT_NAMES",
    "QuadrupedConfig",
    "QuadrupedState",
    "quad_step",
    "FootGaitParams",
    "foot_target_height",
    "duty_cycled_height",
    "REWARD_API",
]
