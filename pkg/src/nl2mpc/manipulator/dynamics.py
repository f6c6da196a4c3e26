"""Manipulator surrogate dynamics.

The palm is a velocity-commanded point with a gripper fraction (0 closed,
1 open) and a wrist rotation rate about x.  Free objects rest in place and
settle back to their table height when released; a held object tracks the
palm with the offset captured at grasp time.  Touching the drawer or faucet
handle with the gripper sufficiently closed couples the palm's velocity into
the fixture's joint fraction.

State vector layout (dim 43):
    [0:3]    palm position
    [3:6]    realized palm velocity (m/s, last step)
    [6]      gripper fraction, 0 closed .. 1 open
    [7]      arm joint-speed proxy (rad/s scale)
    [8:40]   per object (apple, banana, box, bowl):
             position (3), velocity (3), rotation about x (1), held flag (1)
    [40]     drawer joint fraction in [0, 1]
    [41]     faucet joint fraction in [0, 1]
    [42]     time (s)

Action vector layout (dim 5):
    [0:3]  commanded palm velocity
    [3]    gripper rate
    [4]    wrist rotation rate (applies to held objects)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nl2mpc.manipulator.config import ManipulatorConfig
from nl2mpc.manipulator.scene import OBJECT_NAMES, Scene
from nl2mpc.mathutil import wrap_angle

STATE_DIM = 43
ACTION_DIM = 5

_OBJ_BASE = 8
_OBJ_STRIDE = 8


def obj_slice(index: int) -> slice:
    return slice(_OBJ_BASE + _OBJ_STRIDE * index, _OBJ_BASE + _OBJ_STRIDE * (index + 1))


@dataclass(frozen=True)
class ManipulatorState:
    """Named view of one manipulator state."""

    palm: tuple[float, float, float]
    palm_velocity: tuple[float, float, float]
    gripper: float
    joint_speed: float
    objects: dict  # name -> {position, velocity, rotation, held}
    drawer: float
    faucet: float
    time: float = 0.0

    def to_vector(self) -> np.ndarray:
        parts = [list(self.palm), list(self.palm_velocity), [self.gripper, self.joint_speed]]
        for name in OBJECT_NAMES:
            o = self.objects[name]
            parts.append(list(o["position"]))
            parts.append(list(o["velocity"]))
            parts.append([o["rotation"], 1.0 if o["held"] else 0.0])
        parts.append([self.drawer, self.faucet, self.time])
        return np.concatenate(parts).astype(float)

    @staticmethod
    def from_vector(x: np.ndarray) -> "ManipulatorState":
        x = np.asarray(x, dtype=float)
        objects = {}
        for i, name in enumerate(OBJECT_NAMES):
            s = x[obj_slice(i)]
            objects[name] = {
                "position": tuple(s[0:3]),
                "velocity": tuple(s[3:6]),
                "rotation": float(s[6]),
                "held": bool(s[7] > 0.5),
            }
        return ManipulatorState(
            palm=tuple(x[0:3]),
            palm_velocity=tuple(x[3:6]),
            gripper=float(x[6]),
            joint_speed=float(x[7]),
            objects=objects,
            drawer=float(x[40]),
            faucet=float(x[41]),
            time=float(x[42]),
        )

    def to_json(self) -> dict:
        return {
            "palm": list(self.palm),
            "palm_velocity": list(self.palm_velocity),
            "gripper": self.gripper,
            "joint_speed": self.joint_speed,
            "objects": {
                k: {
                    "position": list(v["position"]),
                    "velocity": list(v["velocity"]),
                    "rotation": v["rotation"],
                    "held": v["held"],
                }
                for k, v in self.objects.items()
            },
            "drawer": self.drawer,
            "faucet": self.faucet,
            "time": self.time,
        }


def initial_state(scene: Scene) -> ManipulatorState:
    objects = {
        name: {
            "position": tuple(scene.objects[name].position),
            "velocity": (0.0, 0.0, 0.0),
            "rotation": float(scene.objects[name].rotation),
            "held": False,
        }
        for name in OBJECT_NAMES
    }
    return ManipulatorState(
        palm=tuple(scene.palm_start),
        palm_velocity=(0.0, 0.0, 0.0),
        gripper=0.0,
        joint_speed=0.0,
        objects=objects,
        drawer=0.0,
        faucet=0.0,
        time=0.0,
    )


def clamp_action(u: np.ndarray, cfg: ManipulatorConfig) -> np.ndarray:
    lo, hi = cfg.action_bounds()
    return np.clip(u, lo, hi)


def manip_step(x: np.ndarray, u: np.ndarray, cfg: ManipulatorConfig, scene: Scene) -> np.ndarray:
    """Advance one step of dt.  Broadcasts over leading batch axes."""
    x = np.asarray(x, dtype=float)
    u = clamp_action(np.asarray(u, dtype=float), cfg)
    dt = cfg.dt
    out = np.array(x, copy=True)

    palm_old = x[..., 0:3]
    palm_new = np.stack(
        [
            np.clip(palm_old[..., 0] + u[..., 0] * dt, *cfg.workspace_x),
            np.clip(palm_old[..., 1] + u[..., 1] * dt, *cfg.workspace_y),
            np.clip(palm_old[..., 2] + u[..., 2] * dt, *cfg.workspace_z),
        ],
        axis=-1,
    )
    v_act = (palm_new - palm_old) / dt
    grip = np.clip(x[..., 6] + u[..., 3] * dt, 0.0, 1.0)
    wrist_rate = u[..., 4]
    joint_speed = (
        cfg.joint_speed_k_lin * np.linalg.norm(v_act, axis=-1)
        + cfg.joint_speed_k_wrist * np.abs(wrist_rate)
    )

    out[..., 0:3] = palm_new
    out[..., 3:6] = v_act
    out[..., 6] = grip
    out[..., 7] = joint_speed

    # articulated fixtures: project realized palm velocity onto the joint
    q_drawer = x[..., 40]
    handle = scene.drawer_handle_pos(q_drawer)
    near_drawer = np.linalg.norm(palm_new - handle, axis=-1) < cfg.engage_radius
    engaged_d = near_drawer & (grip < cfg.engage_close)
    axis = np.asarray(scene.drawer_axis)
    dq_drawer = np.sum(v_act * axis, axis=-1) * dt / scene.drawer_travel
    out[..., 40] = np.clip(q_drawer + np.where(engaged_d, dq_drawer, 0.0), 0.0, 1.0)

    q_faucet = x[..., 41]
    grip_pt = scene.faucet_grip_pos(q_faucet)
    near_faucet = np.linalg.norm(palm_new - grip_pt, axis=-1) < cfg.engage_radius
    engaged_f = near_faucet & (grip < cfg.engage_close)
    tangent = scene.faucet_tangent(q_faucet)
    dq_faucet = np.sum(v_act * tangent, axis=-1) * dt / scene.faucet_arc_length
    out[..., 41] = np.clip(q_faucet + np.where(engaged_f, dq_faucet, 0.0), 0.0, 1.0)

    closed = grip < cfg.grasp_close
    for i, name in enumerate(OBJECT_NAMES):
        s = obj_slice(i)
        pos_old = x[..., s][..., 0:3]
        rot_old = x[..., s][..., 6]
        held_old = x[..., s][..., 7] > 0.5

        near = np.linalg.norm(palm_new - pos_old, axis=-1) < cfg.grasp_radius
        held_new = closed & (held_old | near)

        # a held object keeps its palm offset; a newly held one starts from
        # where it is, so grasping never teleports anything
        offset = np.where(held_old[..., None], pos_old - palm_old, pos_old - palm_new)
        pos_held = palm_new + offset

        rest_z = scene.objects[name].position[2]
        fall_z = np.maximum(rest_z, pos_old[..., 2] - cfg.fall_speed * dt)
        pos_free = np.stack([pos_old[..., 0], pos_old[..., 1], fall_z], axis=-1)

        pos_new = np.where(held_new[..., None], pos_held, pos_free)
        rot_new = wrap_angle(rot_old + np.where(held_new, wrist_rate * dt, 0.0))

        out[..., s.start : s.start + 3] = pos_new
        out[..., s.start + 3 : s.start + 6] = (pos_new - pos_old) / dt
        out[..., s.start + 6] = rot_new
        out[..., s.start + 7] = held_new.astype(float)

    out[..., 42] = x[..., 42] + dt
    return out


_STATIC_FEATURES = None


def extract_features(x: np.ndarray, scene: Scene) -> dict:
    """Feature mapping for the residual catalog; broadcasts over batches."""
    x = np.asarray(x, dtype=float)
    f: dict = {}
    palm = x[..., 0:3]
    for k, ax in enumerate("xyz"):
        f[f"palm_{ax}"] = palm[..., k]
    for i, name in enumerate(OBJECT_NAMES):
        s = obj_slice(i)
        for k, ax in enumerate("xyz"):
            f[f"{name}_{ax}"] = x[..., s.start + k]
        f[f"rot_{name}"] = x[..., s.start + 6]

    q_drawer = x[..., 40]
    q_faucet = x[..., 41]
    handle = scene.drawer_handle_pos(q_drawer)
    center = scene.drawer_center_pos(q_drawer)
    faucet = scene.faucet_grip_pos(q_faucet)
    for k, ax in enumerate("xyz"):
        f[f"drawer_handle_{ax}"] = handle[..., k]
        f[f"drawer_center_{ax}"] = center[..., k]
        f[f"faucet_handle_{ax}"] = faucet[..., k]
        f[f"rest_position_{ax}"] = np.broadcast_to(
            np.float64(scene.rest_position[k]), np.shape(q_drawer)
        )
    f["rot_faucet_handle"] = q_faucet * (np.pi / 2.0)
    f["joint_drawer"] = q_drawer
    f["joint_faucet"] = q_faucet

    # action-regularizer features
    ee_vel = x[..., 3:6]
    for k, ax in enumerate("xyz"):
        f[f"ee_vel_{ax}"] = ee_vel[..., k]
    f["ee_speed"] = np.linalg.norm(ee_vel, axis=-1)
    f["joint_speed"] = x[..., 7]
    f["gripper"] = x[..., 6]

    # nearest free-object statistics for the regularizer
    dists = []
    vels = []
    for i in range(len(OBJECT_NAMES)):
        s = obj_slice(i)
        dists.append(np.linalg.norm(x[..., s.start : s.start + 3] - palm, axis=-1))
        vels.append(x[..., s.start + 3 : s.start + 6])
    dist_arr = np.stack(dists, axis=-1)
    vel_arr = np.stack(vels, axis=-2)
    nearest = np.argmin(dist_arr, axis=-1)
    f["near_obj_dist"] = np.take_along_axis(dist_arr, nearest[..., None], axis=-1)[..., 0]
    near_vel = np.take_along_axis(vel_arr, nearest[..., None, None], axis=-2)[..., 0, :]
    for k, ax in enumerate("xyz"):
        f[f"near_obj_vel_{ax}"] = near_vel[..., k]

    f["time"] = x[..., 42]
    return f
