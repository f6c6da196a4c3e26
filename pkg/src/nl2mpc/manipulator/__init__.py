"""Tabletop manipulator surrogate: palm kinematics, scene coupling, reward API."""

from nl2mpc.manipulator.config import ManipulatorConfig
from nl2mpc.manipulator.scene import OBJECT_NAMES, POINT_NAMES, Scene, default_scene
from nl2mpc.manipulator.dynamics import ManipulatorState, manip_step
from nl2mpc.manipulator import catalog as _catalog  # registers residuals on import
from nl2mpc.manipulator.api import REWARD_API
from nl2mpc.manipulator.sim2real import sim2real_residuals

__all__ = [
    "ManipulatorConfig",
    "OBJECT_NAMES",
    "POINT_NAMES",
    "Scene",
    "default_scene",
    "ManipulatorState",
    "manip_step",
    "REWARD_API",
    "sim2real_residuals",
]
