"""Receding-horizon execution.

Every control step re-plans from the current state with the previous plan
shifted one step as the warm start, applies the first action, and records a
frame.  The reward model is fetched from a provider callable once per
control step, so replacing the specification mid-run takes effect exactly at
a control-step boundary and no frame ever mixes two specifications.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from nl2mpc.errors import ValidationError
from nl2mpc.planning.config import PlannerConfig
from nl2mpc.planning.ilqg import ilqg_plan
from nl2mpc.planning.model import DynamicsModel, RewardModel
from nl2mpc.planning.result import PlanResult
from nl2mpc.planning.sampling import ps_plan


@dataclass(frozen=True)
class Frame:
    t: float
    state: np.ndarray          # state the action was applied in
    action: np.ndarray
    reward: float              # reward(state, action)
    spec_checksum: str = ""


@dataclass(frozen=True)
class Trajectory:
    frames: tuple[Frame, ...]
    final_state: np.ndarray
    dt: float
    backend: str
    seed: int

    def states(self) -> np.ndarray:
        return np.stack([f.state for f in self.frames] + [self.final_state])

    def rewards(self) -> np.ndarray:
        return np.array([f.reward for f in self.frames])

    def duration(self) -> float:
        return len(self.frames) * self.dt


def plan(
    dyn: DynamicsModel,
    rew: RewardModel,
    x0: np.ndarray,
    nominal: np.ndarray,
    cfg: PlannerConfig,
    rng: np.random.Generator | None = None,
    max_iterations: int | None = None,
) -> PlanResult:
    """Single planning call dispatched on the configured backend."""
    if cfg.backend == "ps":
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        return ps_plan(dyn, rew, x0, nominal, cfg, rng)
    return ilqg_plan(dyn, rew, x0, nominal, cfg, max_iterations=max_iterations)


def receding_run(
    dyn: DynamicsModel,
    reward_provider: Callable[[], RewardModel],
    x0: np.ndarray,
    duration: float,
    cfg: PlannerConfig,
    rng: np.random.Generator | None = None,
    on_frame: Callable[[Frame], None] | None = None,
    on_diagnostics: Callable[[dict], None] | None = None,
) -> Trajectory:
    """Run the control loop for `duration` seconds of simulated time."""
    if not (duration > 0):
        raise ValidationError(f"duration must be > 0, got {duration}")
    n_steps = int(round(duration / dyn.dt))
    if n_steps < 1:
        raise ValidationError(
            f"duration {duration} is shorter than one control step of {dyn.dt}"
        )
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    x = np.asarray(x0, dtype=float).copy()
    nominal = np.zeros((cfg.horizon, dyn.action_dim))
    frames: list[Frame] = []

    for step_idx in range(n_steps):
        rew = reward_provider()
        result = plan(
            dyn, rew, x, nominal, cfg, rng=rng,
            max_iterations=cfg.ilqg.receding_iterations if cfg.backend == "ilqg" else None,
        )
        u0 = result.actions[0]
        r0 = float(result.rewards[0])
        frame = Frame(
            t=step_idx * dyn.dt,
            state=x.copy(),
            action=np.asarray(u0, dtype=float).copy(),
            reward=r0,
            spec_checksum=rew.spec_checksum,
        )
        frames.append(frame)
        if on_frame is not None:
            on_frame(frame)
        if on_diagnostics is not None:
            on_diagnostics(
                {
                    "step": step_idx,
                    "t": frame.t,
                    "J": result.J,
                    "iterations": result.iterations,
                    "reward": r0,
                }
            )
        x = dyn.step(x, u0)
        # warm start: shift one step, repeat the tail action
        nominal = np.concatenate([result.actions[1:], result.actions[-1:]], axis=0)

    return Trajectory(
        frames=tuple(frames),
        final_state=x,
        dt=dyn.dt,
        backend=cfg.backend,
        seed=cfg.seed,
    )
