"""Quadruped surrogate dynamics.

The torso is a kinematic 6-DoF body.  Planar motion and yaw are second
order: the action commands local accelerations and the velocities integrate
semi-implicitly with viscous damping.  Height, roll, and pitch are first
order: the action commands their rates directly.  Each foot is a point
integrating commanded velocities, expressed with x (forward) and y (left) in
the heading-aligned torso frame and z as height above ground, clamped to a
reachable box with z >= 0.

State vector layout (dim 22):
    [0:3]   world position x, y, z
    [3:6]   roll, pitch, yaw           (wrapped to (-pi, pi])
    [6:8]   local velocity vx, vy      (m/s, x forward / y left)
    [8]     yaw rate                   (rad/s)
    [9:21]  feet front_left, back_left, front_right, back_right as (x, y, z)
    [21]    time (s)

Action vector layout (dim 18):
    [0:2]   local acceleration ax, ay  (m/s^2)
    [2]     height rate                (m/s)
    [3:5]   roll rate, pitch rate      (rad/s)
    [5]     yaw acceleration           (rad/s^2)
    [6:18]  per-foot velocity commands (m/s), same foot order
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nl2mpc.mathutil import wrap_angle
from nl2mpc.quadruped.config import FOOT_HOME, FOOT_NAMES, QuadrupedConfig

STATE_DIM = 22
ACTION_DIM = 18


@dataclass(frozen=True)
class QuadrupedState:
    """Named view of one quadruped state."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float]  # roll, pitch, yaw
    velocity_xy: tuple[float, float]
    yaw_rate: float
    feet: dict  # foot name -> (x, y, z)
    time: float = 0.0

    def to_vector(self) -> np.ndarray:
        parts = [
            list(self.position),
            list(self.orientation),
            list(self.velocity_xy),
            [self.yaw_rate],
        ]
        for foot in FOOT_NAMES:
            parts.append(list(self.feet[foot]))
        parts.append([self.time])
        return np.concatenate(parts).astype(float)

    @staticmethod
    def from_vector(x: np.ndarray) -> "QuadrupedState":
        x = np.asarray(x, dtype=float)
        feet = {
            foot: tuple(x[9 + 3 * i : 12 + 3 * i])
            for i, foot in enumerate(FOOT_NAMES)
        }
        return QuadrupedState(
            position=tuple(x[0:3]),
            orientation=tuple(x[3:6]),
            velocity_xy=tuple(x[6:8]),
            yaw_rate=float(x[8]),
            feet=feet,
            time=float(x[21]),
        )

    def to_json(self) -> dict:
        return {
            "position": list(self.position),
            "orientation": list(self.orientation),
            "velocity_xy": list(self.velocity_xy),
            "yaw_rate": self.yaw_rate,
            "feet": {k: list(v) for k, v in self.feet.items()},
            "time": self.time,
        }


def nominal_stand(cfg: QuadrupedConfig, yaw: float = 0.0) -> QuadrupedState:
    """Resting stance: torso at stand height, feet at their home offsets."""
    feet = {foot: (FOOT_HOME[foot][0], FOOT_HOME[foot][1], 0.0) for foot in FOOT_NAMES}
    return QuadrupedState(
        position=(0.0, 0.0, cfg.stand_height),
        orientation=(0.0, 0.0, yaw),
        velocity_xy=(0.0, 0.0),
        yaw_rate=0.0,
        feet=feet,
        time=0.0,
    )


def clamp_action(u: np.ndarray, cfg: QuadrupedConfig) -> np.ndarray:
    lo, hi = cfg.action_bounds()
    return np.clip(u, lo, hi)


def quad_step(x: np.ndarray, u: np.ndarray, cfg: QuadrupedConfig) -> np.ndarray:
    """Advance one step of dt.  Broadcasts over leading batch axes."""
    x = np.asarray(x, dtype=float)
    u = clamp_action(np.asarray(u, dtype=float), cfg)
    dt = cfg.dt
    out = np.empty_like(x)

    # second-order planar/yaw subsystem, semi-implicit with viscous damping
    vx = x[..., 6] + (u[..., 0] - cfg.damping_linear * x[..., 6]) * dt
    vy = x[..., 7] + (u[..., 1] - cfg.damping_linear * x[..., 7]) * dt
    wz = x[..., 8] + (u[..., 5] - cfg.damping_yaw * x[..., 8]) * dt
    yaw = wrap_angle(x[..., 5] + wz * dt)

    # first-order attitude and height
    roll = wrap_angle(x[..., 3] + u[..., 3] * dt)
    pitch = wrap_angle(x[..., 4] + u[..., 4] * dt)
    z = np.clip(x[..., 2] + u[..., 2] * dt, cfg.z_min, cfg.z_max)

    # local velocity rotated into the world by the updated heading
    cy, sy = np.cos(yaw), np.sin(yaw)
    out[..., 0] = x[..., 0] + (vx * cy - vy * sy) * dt
    out[..., 1] = x[..., 1] + (vx * sy + vy * cy) * dt
    out[..., 2] = z
    out[..., 3] = roll
    out[..., 4] = pitch
    out[..., 5] = yaw
    out[..., 6] = vx
    out[..., 7] = vy
    out[..., 8] = wz

    feet = x[..., 9:21] + u[..., 6:18] * dt
    fx = np.clip(feet[..., 0::3], cfg.foot_x_range[0], cfg.foot_x_range[1])
    fy = np.clip(feet[..., 1::3], cfg.foot_y_range[0], cfg.foot_y_range[1])
    fz = np.clip(feet[..., 2::3], cfg.foot_z_range[0], cfg.foot_z_range[1])
    out[..., 9:21:3] = fx
    out[..., 10:21:3] = fy
    out[..., 11:21:3] = fz

    out[..., 21] = x[..., 21] + dt
    return out


_FEATURE_NAMES = None


def feature_names() -> list[str]:
    global _FEATURE_NAMES
    if _FEATURE_NAMES is None:
        names = [
            "pos_x", "pos_y", "pos_z", "roll", "pitch", "yaw",
            "vel_x", "vel_y", "yaw_rate",
        ]
        for foot in FOOT_NAMES:
            names += [f"foot_{foot}_x", f"foot_{foot}_y", f"foot_{foot}_z"]
        names.append("time")
        _FEATURE_NAMES = names
    return _FEATURE_NAMES


def extract_features(x: np.ndarray) -> dict:
    """Feature mapping for the residual catalog; broadcasts over batches."""
    x = np.asarray(x, dtype=float)
    return {name: x[..., i] for i, name in enumerate(feature_names())}
