"""Planner output container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PlanResult:
    actions: np.ndarray      # (H, m)
    states: np.ndarray       # (H + 1, n), states[0] is the start state
    rewards: np.ndarray      # (H,), reward(states[t], actions[t])
    J: float                 # sum of rewards
    iterations: int
    backend: str
    diagnostics: tuple = ()  # per-iteration dicts: J, dJ, mu, alpha, ...
