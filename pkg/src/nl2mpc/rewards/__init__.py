"""Reward algebra: weighted residual terms reduced through norms."""

from nl2mpc.rewards.core import (
    Norm,
    ResidualTerm,
    RewardSpec,
    StepFeatures,
    accumulate_return,
    eval_reward,
    remove_term,
    spec_checksum,
    spec_from_json,
    spec_to_canonical_json,
    upsert_term,
)
from nl2mpc.rewards.registry import ResidualDef, get_residual, register_residual

__all__ = [
    "Norm",
    "ResidualTerm",
    "RewardSpec",
    "StepFeatures",
    "accumulate_return",
    "eval_reward",
    "remove_term",
    "spec_checksum",
    "spec_from_json",
    "spec_to_canonical_json",
    "upsert_term",
    "ResidualDef",
    "get_residual",
    "register_residual",
]
