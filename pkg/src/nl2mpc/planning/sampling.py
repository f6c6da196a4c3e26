"""Predictive sampling: random spline-knot search with nominal elitism.

Each call samples `num_samples` candidate action sequences by perturbing the
nominal at spline knots with Gaussian noise (zero-order hold between knots),
clips them to the action bounds, rolls every candidate out in one batch, and
returns the best by total reward.  The unperturbed nominal always rolls out
as candidate zero, and ties resolve in its favor, so the best return can
never decrease across repeated calls on the same problem.
"""

from __future__ import annotations

import numpy as np

from nl2mpc.errors import NumericError
from nl2mpc.planning.config import PlannerConfig
from nl2mpc.planning.model import DynamicsModel, RewardModel
from nl2mpc.planning.result import PlanResult


def knot_indices(horizon: int, num_knots: int) -> np.ndarray:
    """Knot index owning each step under a zero-order hold."""
    return (np.arange(horizon) * num_knots) // horizon


def ps_plan(
    dyn: DynamicsModel,
    rew: RewardModel,
    x0: np.ndarray,
    nominal: np.ndarray,
    cfg: PlannerConfig,
    rng: np.random.Generator,
) -> PlanResult:
    H = cfg.horizon
    m = dyn.action_dim
    nominal = np.asarray(nominal, dtype=float)
    if nominal.shape != (H, m):
        raise ValueError(f"nominal must have shape {(H, m)}, got {nominal.shape}")

    K = cfg.ps.num_samples
    num_knots = cfg.num_knots()
    sigma = cfg.ps.noise_scale * (dyn.action_high - dyn.action_low)

    # knot noise, held between knots; candidate 0 is the untouched nominal
    noise = rng.normal(size=(K, num_knots, m)) * sigma
    held = noise[:, knot_indices(H, num_knots), :]
    candidates = np.concatenate([nominal[None], dyn.clip(nominal[None] + held)], axis=0)

    B = K + 1
    X = np.broadcast_to(np.asarray(x0, dtype=float), (B, dyn.state_dim)).copy()
    states = np.empty((B, H + 1, dyn.state_dim))
    rewards = np.empty((B, H))
    states[:, 0] = X
    for t in range(H):
        u_t = candidates[:, t]
        r_t = rew.reward(X, u_t)
        if not np.all(np.isfinite(r_t)):
            raise NumericError(f"non-finite reward in rollout at step {t}")
        rewards[:, t] = r_t
        X = dyn.step(X, u_t)
        if not np.all(np.isfinite(X)):
            raise NumericError(f"non-finite state in rollout at step {t}")
        states[:, t + 1] = X

    J = np.sum(rewards, axis=1)
    best = int(np.argmax(J))  # first max wins: ties keep the nominal

    return PlanResult(
        actions=candidates[best].copy(),
        states=states[best].copy(),
        rewards=rewards[best].copy(),
        J=float(J[best]),
        iterations=1,
        backend="ps",
        diagnostics=({"J": float(J[best]), "best_index": best, "num_candidates": B},),
    )
