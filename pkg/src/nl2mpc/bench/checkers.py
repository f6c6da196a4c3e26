"""Success predicates for the benchmark tasks.

Each checker is a pure function of the recorded trajectories and the task's
thresholds.  Tasks that require a behavior to be sustained use a contiguous
hold window: a run of consecutive samples whose spanned time reaches the
task's hold duration.  Multi-turn tasks receive one trajectory per
instruction turn; single-turn checkers read the final turn.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from nl2mpc.errors import ValidationError
from nl2mpc.mathutil import wrap_angle
from nl2mpc.planning.receding import Trajectory
from nl2mpc.quadruped.config import FOOT_NAMES
from nl2mpc.quadruped import dynamics as quad_dyn
from nl2mpc.manipulator import dynamics as manip_dyn
from nl2mpc.manipulator.scene import OBJECT_NAMES


def held_for(mask: np.ndarray, dt: float, hold: float) -> bool:
    """True when some contiguous run of True samples spans >= hold seconds.

    A run of L samples spans (L - 1) * dt; a single True sample satisfies
    only hold == 0.  Extending a trajectory can only add runs, so a
    satisfied hold never becomes unsatisfied on a longer recording.
    """
    mask = np.asarray(mask, dtype=bool)
    best = run = 0
    for m in mask:
        run = run + 1 if m else 0
        best = max(best, run)
    if best == 0:
        return False
    return (best - 1) * dt >= hold


def _states(traj: Trajectory) -> np.ndarray:
    return traj.states()


def _require_embodiment(task, trajs: Sequence[Trajectory]) -> None:
    want = quad_dyn.STATE_DIM if task.embodiment == "quadruped" else manip_dyn.STATE_DIM
    for traj in trajs:
        got = int(np.asarray(traj.final_state).shape[-1])
        if got != want:
            raise ValidationError(
                f"task {task.id!r} expects {task.embodiment} states of dim {want}, "
                f"got dim {got}"
            )


def _foot_z_col(foot: str) -> int:
    return 9 + 3 * FOOT_NAMES.index(foot) + 2


def _object_col(name: str) -> int:
    return manip_dyn.obj_slice(OBJECT_NAMES.index(name)).start


# -- quadruped ---------------------------------------------------------------


def _check_heading(task, trajs):
    s = _states(trajs[-1])
    err = np.abs(wrap_angle(s[:, 5] - task.thresholds["target"]))
    return held_for(err <= task.thresholds["tolerance"], trajs[-1].dt, task.hold)


def _check_sit(task, trajs):
    s = _states(trajs[-1])
    tilt = task.thresholds["max_tilt"]
    ok = (
        (s[:, 2] <= task.thresholds["max_height"])
        & (np.abs(wrap_angle(s[:, 3])) <= tilt)
        & (np.abs(wrap_angle(s[:, 4])) <= tilt)
    )
    return held_for(ok, trajs[-1].dt, task.hold)


def _check_rolled_over(task, trajs):
    s = _states(trajs[-1])
    up_z = np.cos(s[:, 3]) * np.cos(s[:, 4])
    return held_for(up_z <= task.thresholds["max_up_z"], trajs[-1].dt, task.hold)


def _check_spin(task, trajs):
    s = _states(trajs[-1])
    ok = np.abs(s[:, 8]) >= task.thresholds["min_yaw_rate"]
    return held_for(ok, trajs[-1].dt, task.hold)


def _check_paw_height(task, trajs):
    s = _states(trajs[-1])
    z = s[:, _foot_z_col(task.thresholds["foot"])]
    return held_for(z >= task.thresholds["min_height"], trajs[-1].dt, task.hold)


def _check_paw_higher(task, trajs):
    if len(trajs) < 2:
        raise ValidationError(
            f"task {task.id!r} compares two turns, got {len(trajs)} trajectory(ies)"
        )
    col = _foot_z_col(task.thresholds["foot"])
    before = float(np.max(_states(trajs[0])[:, col]))
    after = float(np.max(_states(trajs[-1])[:, col]))
    return after >= before + task.thresholds["margin"]


def _check_spin_with_paws(task, trajs):
    s = _states(trajs[-1])
    ok = np.abs(s[:, 8]) >= task.thresholds["min_yaw_rate"]
    for foot in task.thresholds["feet"]:
        ok = ok & (s[:, _foot_z_col(foot)] >= task.thresholds["min_height"])
    return held_for(ok, trajs[-1].dt, task.hold)


def _check_biped(task, trajs):
    s = _states(trajs[-1])
    pitch_err = np.abs(wrap_angle(s[:, 4] - task.thresholds["pitch_target"]))
    ok = (pitch_err <= task.thresholds["pitch_tolerance"]) & (
        s[:, 2] >= task.thresholds["min_height"]
    )
    return held_for(ok, trajs[-1].dt, task.hold)


# -- manipulator -------------------------------------------------------------


def _check_touch(task, trajs):
    s = _states(trajs[-1])
    obj = s[:, _object_col(task.thresholds["object"]) :][:, 0:3]
    dist = np.linalg.norm(s[:, 0:3] - obj, axis=-1)
    return bool(np.min(dist) <= task.thresholds["max_distance"])


def _check_objects_above(task, trajs):
    s = _states(trajs[-1])
    ok = np.ones(len(s), dtype=bool)
    for name in task.thresholds["objects"]:
        ok = ok & (s[:, _object_col(name) + 2] > task.thresholds["min_height"])
    return held_for(ok, trajs[-1].dt, task.hold)


def _check_final_distance(task, trajs):
    s = np.asarray(trajs[-1].final_state, dtype=float)
    a = s[_object_col(task.thresholds["object_a"]) :][0:3]
    b = s[_object_col(task.thresholds["object_b"]) :][0:3]
    return bool(np.linalg.norm(a - b) < task.thresholds["max_distance"])


def _check_up_vector(task, trajs):
    rot = float(np.asarray(trajs[-1].final_state)[_object_col(task.thresholds["object"]) + 6])
    up_dot = math.cos(rot)
    if "min_up_dot" in task.thresholds:
        return up_dot >= task.thresholds["min_up_dot"]
    return up_dot <= task.thresholds["max_up_dot"]


def _check_joint_open(task, trajs):
    col = 40 if task.thresholds["joint"] == "drawer" else 41
    frac = _states(trajs[-1])[:, col]
    return bool(np.max(frac) >= task.thresholds["min_fraction"])


CHECKERS = {
    "heading": _check_heading,
    "sit": _check_sit,
    "rolled_over": _check_rolled_over,
    "spin": _check_spin,
    "paw_height": _check_paw_height,
    "paw_higher": _check_paw_higher,
    "spin_with_paws": _check_spin_with_paws,
    "biped": _check_biped,
    "touch": _check_touch,
    "objects_above": _check_objects_above,
    "final_distance": _check_final_distance,
    "up_vector": _check_up_vector,
    "joint_open": _check_joint_open,
}


def check_success(task, trajectories) -> bool:
    """Evaluate the task's success predicate on recorded trajectories.

    Accepts one Trajectory or a sequence with one entry per instruction
    turn; checkers that compare turns require the full sequence.
    """
    if isinstance(trajectories, Trajectory):
        trajectories = (trajectories,)
    trajs = tuple(trajectories)
    if not trajs:
        raise ValidationError("check_success needs at least one trajectory")
    _require_embodiment(task, trajs)
    try:
        checker = CHECKERS[task.checker]
    except KeyError:
        raise ValidationError(f"task {task.id!r} names unknown checker {task.checker!r}") from None
    return bool(checker(task, trajs))
