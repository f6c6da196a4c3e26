"""Action regularizer for transfer-friendly manipulator motions.

Five residual terms discourage jerky or unsafe commands:

    coefficient 3    end-effector velocity, active above 0.3 m/s
    coefficient 1    arm joint speed, active above 0.7
    coefficient 0.05 velocity of the object nearest the palm
    coefficient 0.1  palm/object velocity mismatch within 0.1 m
    coefficient 0.4  gripper posture: open (1) when far from objects,
                     closed (0) when near

Each entry is its own residual term so the evaluated contribution is
-coefficient * norm(residual), and a spec can carry all five at once.
"""

from __future__ import annotations

import numpy as np

from nl2mpc.rewards.core import Norm, ResidualTerm, RewardSpec, upsert_term
from nl2mpc.rewards.registry import get_residual

S2R_TERMS = (
    ("s2r.ee_speed", "s2r_ee_speed", 3.0),
    ("s2r.joint_speed", "s2r_joint_speed", 1.0),
    ("s2r.obj_speed", "s2r_obj_speed", 0.05),
    ("s2r.speed_match", "s2r_speed_match", 0.1),
    ("s2r.gripper_posture", "s2r_gripper_posture", 0.4),
)


def add_sim2real_terms(spec: RewardSpec) -> RewardSpec:
    for term_id, fn, weight in S2R_TERMS:
        spec = upsert_term(
            spec,
            ResidualTerm(id=term_id, residual_fn=fn, params={}, weight=weight, norm=Norm()),
        )
    return spec


def sim2real_residuals(features) -> list[tuple[np.ndarray, float]]:
    """Evaluate the five regularizer residuals at a feature mapping.

    Returns [(residual vector, coefficient), ...] in fixed term order.
    """
    out = []
    for _, fn, weight in S2R_TERMS:
        r = get_residual(fn).fn(features, {})
        out.append((np.asarray(r, dtype=float), weight))
    return out
