"""Bridges from embodiments and reward specs to planner models."""

from __future__ import annotations

import numpy as np

from nl2mpc.errors import ValidationError
from nl2mpc.planning.model import DynamicsModel, RewardModel
from nl2mpc.rewards.core import RewardSpec, spec_checksum
from nl2mpc.rewards.registry import get_residual

EMBODIMENTS = ("quadruped", "manipulator")


def quadruped_dynamics(cfg=None) -> DynamicsModel:
    from nl2mpc.quadruped.config import QuadrupedConfig
    from nl2mpc.quadruped import dynamics as qd

    cfg = cfg or QuadrupedConfig()
    lo, hi = cfg.action_bounds()
    return DynamicsModel(
        step=lambda x, u: qd.quad_step(x, u, cfg),
        state_dim=qd.STATE_DIM,
        action_dim=qd.ACTION_DIM,
        dt=cfg.dt,
        action_low=lo,
        action_high=hi,
    )


def manipulator_dynamics(cfg=None, scene=None) -> DynamicsModel:
    from nl2mpc.manipulator.config import ManipulatorConfig
    from nl2mpc.manipulator.scene import default_scene
    from nl2mpc.manipulator import dynamics as md

    cfg = cfg or ManipulatorConfig()
    scene = scene or default_scene()
    lo, hi = cfg.action_bounds()
    return DynamicsModel(
        step=lambda x, u: md.manip_step(x, u, cfg, scene),
        state_dim=md.STATE_DIM,
        action_dim=md.ACTION_DIM,
        dt=cfg.dt,
        action_low=lo,
        action_high=hi,
    )


def spec_reward_model(spec: RewardSpec, embodiment: str, scene=None) -> RewardModel:
    """Compile a reward spec into a batched residual stack over state vectors.

    Catalog residuals depend on the state only; the action argument is
    accepted and ignored so the model satisfies the planner interface.
    """
    if embodiment == "quadruped":
        from nl2mpc.quadruped.dynamics import extract_features

        featurize = extract_features
    elif embodiment == "manipulator":
        from nl2mpc.manipulator.scene import default_scene
        from nl2mpc.manipulator.dynamics import extract_features as mf

        scene = scene or default_scene()
        featurize = lambda x: mf(x, scene)
    else:
        raise ValidationError(
            f"unknown embodiment '{embodiment}'; expected one of {EMBODIMENTS}"
        )

    compiled = [
        (get_residual(t.residual_fn).fn, dict(t.params), t.weight, t.norm)
        for t in spec.terms
    ]

    def stack(x, u):
        feats = featurize(np.asarray(x, dtype=float))
        return [(fn(feats, params), w, norm) for fn, params, w, norm in compiled]

    return RewardModel(stack=stack, spec_checksum=spec_checksum(spec))
