"""Planner-facing model interfaces.

A DynamicsModel wraps a batched step function with its action bounds.  A
RewardModel exposes the per-step reward both as a scalar and as a stack of
weighted, normed residual blocks; the single stack is the one source of
truth, so the value the sampler maximizes and the derivatives the iLQG
backward pass consumes can never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from nl2mpc.errors import NumericError
from nl2mpc.rewards.core import Norm

# residual stack: (X (..., n), U (..., m)) -> [(R (..., d), weight, Norm), ...]
StackFn = Callable[[np.ndarray, np.ndarray], list]


@dataclass(frozen=True)
class DynamicsModel:
    step: Callable[[np.ndarray, np.ndarray], np.ndarray]
    state_dim: int
    action_dim: int
    dt: float
    action_low: np.ndarray
    action_high: np.ndarray

    def clip(self, u: np.ndarray) -> np.ndarray:
        return np.clip(u, self.action_low, self.action_high)


@dataclass(frozen=True)
class RewardModel:
    stack: StackFn
    # identity of the specification this model evaluates, for frame tagging
    spec_checksum: str = ""

    def reward(self, x: np.ndarray, u: np.ndarray):
        """Evaluated reward, broadcasting over leading axes; always <= 0
        for catalog norms of residuals (plus any action blocks)."""
        total = 0.0
        for r, w, norm in self.stack(x, u):
            total = total - w * norm.value(r)
        return total


def reward_model_from_blocks(blocks_fn: StackFn, spec_checksum: str = "") -> RewardModel:
    return RewardModel(stack=blocks_fn, spec_checksum=spec_checksum)


def check_finite_rewards(rewards: np.ndarray, context: str) -> None:
    if not np.all(np.isfinite(rewards)):
        bad = np.argwhere(~np.isfinite(np.atleast_1d(rewards)))
        raise NumericError(f"non-finite reward during {context} at index {bad[0].tolist()}")
