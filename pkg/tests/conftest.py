"""Shared fixtures and random-spec generators."""

from __future__ import annotations

import random

import numpy as np
import pytest

from nl2mpc.quadruped.config import FOOT_NAMES
from nl2mpc.rewards.core import Norm, ResidualTerm, RewardSpec

QUAD_FEATURES = (
    ["pos_x", "pos_y", "pos_z", "roll", "pitch", "yaw", "vel_x", "vel_y", "yaw_rate"]
    + [f"foot_{f}_{ax}" for f in FOOT_NAMES for ax in "xyz"]
    + ["time"]
)

MANIP_POINTS = (
    "palm", "apple", "banana", "box", "bowl",
    "drawer_handle", "faucet_handle", "drawer_center", "rest_position",
)
MANIP_FEATURES = (
    [f"{n}_{ax}" for n in MANIP_POINTS for ax in "xyz"]
    + [f"rot_{n}" for n in ("apple", "banana", "box", "bowl", "faucet_handle")]
    + ["joint_drawer", "joint_faucet"]
    + [f"ee_vel_{ax}" for ax in "xyz"]
    + ["ee_speed", "joint_speed"]
    + [f"near_obj_vel_{ax}" for ax in "xyz"]
    + ["near_obj_dist", "gripper", "time"]
)


def random_norm(rnd: random.Random) -> Norm:
    kind = rnd.choice(["squared-l2", "squared-l2", "l2", "smooth-abs"])
    if kind == "smooth-abs":
        return Norm(kind=kind, epsilon=rnd.uniform(0.01, 0.5))
    return Norm(kind=kind)


def random_quad_term(rnd: random.Random, suffix: str) -> ResidualTerm:
    foot = rnd.choice(FOOT_NAMES)
    choices = [
        ("com_height", {"target": rnd.uniform(0.0, 1.0)}),
        ("base_pitch", {"target": rnd.uniform(-3.0, 3.0)}),
        ("base_roll", {"target": rnd.uniform(-3.0, 3.0)}),
        ("com_xy", {"target": (rnd.uniform(-2, 2), rnd.uniform(-2, 2))}),
        ("base_heading", {"target": rnd.uniform(-3.0, 3.0)}),
        ("forward_velocity", {"target": rnd.uniform(-1, 1)}),
        ("sideways_velocity", {"target": rnd.uniform(-1, 1)}),
        ("yaw_speed", {"target": rnd.uniform(-3, 3)}),
        ("foot_x", {"foot": foot, "target": rnd.uniform(-0.3, 0.3), "home": 0.25}),
        ("foot_y", {"foot": foot, "target": rnd.uniform(-0.2, 0.2), "home": 0.15, "inward_sign": 1.0}),
        ("foot_z", {"foot": foot, "target": rnd.uniform(0.0, 0.6)}),
        (
            "foot_gait_z",
            {
                "foot": foot,
                "amplitude": rnd.uniform(0.0, 0.3),
                "frequency": rnd.uniform(0.0, 3.0),
                "phase_offset": rnd.uniform(0.0, 1.0),
                "air_ratio": rnd.uniform(0.0, 1.0),
            },
        ),
        (
            "foot_gait_x",
            {
                "foot": foot,
                "home": -0.25,
                "amplitude": rnd.uniform(0.0, 0.3),
                "frequency": rnd.uniform(0.0, 3.0),
                "phase_offset": rnd.uniform(0.0, 1.0),
                "air_ratio": rnd.uniform(0.0, 1.0),
                "swing": rnd.uniform(-0.3, 0.3),
            },
        ),
    ]
    fn, params = rnd.choice(choices)
    return ResidualTerm(
        id=f"{fn}.{suffix}",
        residual_fn=fn,
        params=params,
        weight=rnd.uniform(0.0, 10.0),
        norm=random_norm(rnd),
    )


def random_manip_term(rnd: random.Random, suffix: str) -> ResidualTerm:
    pts = rnd.sample(list(MANIP_POINTS), 2)
    choices = [
        ("point_distance", {"name_a": pts[0], "name_b": pts[1]}),
        ("x_rotation", {"name": rnd.choice(["apple", "banana", "box", "bowl", "faucet_handle"]), "target": rnd.uniform(-3, 3)}),
        ("z_height", {"name": rnd.choice(["apple", "banana", "box", "bowl"]), "target": rnd.uniform(0, 1)}),
        ("xy_position", {"name": rnd.choice(["apple", "banana", "box", "bowl"]), "target": (rnd.uniform(-1, 1), rnd.uniform(-1, 1))}),
        ("joint_fraction", {"joint": rnd.choice(["drawer", "faucet"]), "target": rnd.uniform(0, 1)}),
        ("s2r_ee_speed", {}),
        ("s2r_joint_speed", {}),
        ("s2r_obj_speed", {}),
        ("s2r_speed_match", {}),
        ("s2r_gripper_posture", {}),
    ]
    fn, params = rnd.choice(choices)
    return ResidualTerm(
        id=f"{fn}.{suffix}",
        residual_fn=fn,
        params=params,
        weight=rnd.uniform(0.0, 10.0),
        norm=random_norm(rnd),
    )


def random_spec(rnd: random.Random, embodiment: str, max_terms: int = 6) -> RewardSpec:
    make = random_quad_term if embodiment == "quadruped" else random_manip_term
    n = rnd.randint(0, max_terms)
    return RewardSpec(terms=tuple(make(rnd, str(i)) for i in range(n)))


def random_features(rnd: random.Random, embodiment: str) -> dict:
    names = QUAD_FEATURES if embodiment == "quadruped" else MANIP_FEATURES
    f = {name: rnd.uniform(-2.0, 2.0) for name in names}
    if embodiment == "manipulator":
        # keep derived magnitudes meaningful for the gated residuals
        f["ee_speed"] = abs(f["ee_speed"])
        f["joint_speed"] = abs(f["joint_speed"])
        f["near_obj_dist"] = abs(f["near_obj_dist"])
        f["gripper"] = rnd.uniform(0.0, 1.0)
    return f


@pytest.fixture
def rnd():
    return random.Random(20240811)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
