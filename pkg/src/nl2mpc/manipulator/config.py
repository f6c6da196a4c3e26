"""Manipulator surrogate configuration."""

from __future__ import annotations

from dataclasses import dataclass

CONFIG_VERSION = 1


@dataclass(frozen=True)
class ManipulatorConfig:
    dt: float = 0.02
    # action bounds
    max_palm_vel: float = 1.2     # m/s per axis
    max_grip_rate: float = 3.0    # fraction/s
    max_wrist_rate: float = 3.0   # rad/s
    # grasping: an object is held while the palm is within grasp_radius and
    # the gripper is closed below grasp_close
    grasp_radius: float = 0.08
    grasp_close: float = 0.2
    # articulated handles couple while the palm is within engage_radius and
    # the gripper is below engage_close
    engage_radius: float = 0.08
    engage_close: float = 0.5
    # free objects settle back to their rest height at this speed
    fall_speed: float = 1.5       # m/s
    # workspace box for the palm
    workspace_x: tuple[float, float] = (-0.2, 0.9)
    workspace_y: tuple[float, float] = (-0.6, 0.6)
    workspace_z: tuple[float, float] = (0.01, 1.2)
    # arm joint-speed proxy: k_lin * |palm velocity| + k_wrist * |wrist rate|
    joint_speed_k_lin: float = 1.5
    joint_speed_k_wrist: float = 0.3
    version: int = CONFIG_VERSION

    @property
    def action_dim(self) -> int:
        return 5

    def action_bounds(self):
        import numpy as np

        lo = np.array(
            [
                -self.max_palm_vel,
                -self.max_palm_vel,
                -self.max_palm_vel,
                -self.max_grip_rate,
                -self.max_wrist_rate,
            ]
        )
        return lo, -lo
