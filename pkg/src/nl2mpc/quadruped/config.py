"""Quadruped surrogate configuration.

The model is torso-centric: the torso is a floating 6-DoF body and the four
feet are velocity-commanded points expressed with horizontal components in
the heading-aligned torso frame and the vertical component as height above
ground.  Defaults live here and in configs/quadruped.yaml; the YAML file is
the versioned source used by sessions, this dataclass is the in-process form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

FOOT_NAMES = ("front_left", "back_left", "front_right", "back_right")

# accepted spellings seen in instruction scripts; canonicalized on use
FOOT_ALIASES = {
    "front_left": "front_left",
    "back_left": "back_left",
    "front_right": "front_right",
    "back_right": "back_right",
    "rear_left": "back_left",
    "rear_right": "back_right",
}

# nominal stance offsets of each foot from the torso center (x fwd, y left)
FOOT_HOME = {
    "front_left": (0.25, 0.15),
    "back_left": (-0.25, 0.15),
    "front_right": (0.25, -0.15),
    "back_right": (-0.25, -0.15),
}

CONFIG_VERSION = 1


@dataclass(frozen=True)
class QuadrupedConfig:
    dt: float = 0.02
    # viscous damping on torso linear velocity and yaw rate (1/s)
    damping_linear: float = 0.5
    damping_yaw: float = 0.5
    # action bounds
    max_accel_xy: float = 6.0        # m/s^2
    max_vz: float = 1.0              # m/s, commanded height rate
    max_roll_pitch_rate: float = 4.0  # rad/s, commanded
    max_yaw_accel: float = 10.0      # rad/s^2
    max_foot_vel: float = 2.0        # m/s per axis
    # state clamps
    z_min: float = 0.03
    z_max: float = 1.0
    foot_x_range: tuple[float, float] = (-0.7, 0.7)
    foot_y_range: tuple[float, float] = (-0.45, 0.45)
    foot_z_range: tuple[float, float] = (0.0, 0.9)
    # nominal torso height when standing
    stand_height: float = 0.3
    version: int = CONFIG_VERSION

    @property
    def action_dim(self) -> int:
        return 6 + 12

    @property
    def state_dim(self) -> int:
        return 9 + 12 + 1

    def action_bounds(self):
        import numpy as np

        lo = np.concatenate(
            [
                [-self.max_accel_xy, -self.max_accel_xy, -self.max_vz,
                 -self.max_roll_pitch_rate, -self.max_roll_pitch_rate,
                 -self.max_yaw_accel],
                np.full(12, -self.max_foot_vel),
            ]
        )
        return lo, -lo
