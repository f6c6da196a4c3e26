"""Trajectory optimization: predictive sampling and iLQG over batched models."""

from nl2mpc.planning.config import IlqgConfig, PlannerConfig, PredictiveSamplingConfig
from nl2mpc.planning.model import DynamicsModel, RewardModel, reward_model_from_blocks
from nl2mpc.planning.sampling import ps_plan
from nl2mpc.planning.ilqg import ilqg_plan
from nl2mpc.planning.receding import Frame, Trajectory, plan, receding_run

__all__ = [
    "IlqgConfig",
    "PlannerConfig",
    "PredictiveSamplingConfig",
    "DynamicsModel",
    "RewardModel",
    "reward_model_from_blocks",
    "ps_plan",
    "ilqg_plan",
    "Frame",
    "Trajectory",
    "plan",
    "receding_run",
]
