"""Planner configuration.

Defaults: horizon 40 steps at the embodiment's dt, predictive sampling with
32 sampled candidates and noise at 0.2 of the action range, spline knots at
horizon/5, iLQG capped at 50 iterations with convergence tolerance 1e-6.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from nl2mpc.errors import ValidationError

BACKENDS = ("ps", "ilqg")


@dataclass(frozen=True)
class PredictiveSamplingConfig:
    # number of sampled candidates; the unperturbed nominal always rolls out
    # as an extra elite candidate
    num_samples: int = 32
    # per-dimension noise standard deviation as a fraction of action range
    noise_scale: float = 0.2
    # spline knots = max(2, horizon // knot_divisor), zero-order hold
    knot_divisor: int = 5

    def __post_init__(self):
        if self.num_samples < 2:
            raise ValidationError(f"num_samples must be >= 2, got {self.num_samples}")
        if not (self.noise_scale >= 0.0):
            raise ValidationError(f"noise_scale must be >= 0, got {self.noise_scale}")
        if self.knot_divisor < 1:
            raise ValidationError(f"knot_divisor must be >= 1, got {self.knot_divisor}")


@dataclass(frozen=True)
class IlqgConfig:
    max_iterations: int = 50
    tol: float = 1e-6
    mu_init: float = 1e-6
    mu_min: float = 1e-8
    mu_max: float = 1e8
    mu_factor: float = 10.0
    line_search_steps: int = 8   # alphas 1, 1/2, ... 1/2^(steps-1)
    fd_step: float = 1e-5
    # iteration cap per control step when running receding horizon
    receding_iterations: int = 2

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if not (self.tol > 0.0):
            raise ValidationError("tol must be > 0")
        if not (0.0 < self.mu_init <= self.mu_max):
            raise ValidationError("mu_init must be in (0, mu_max]")
        if self.mu_factor <= 1.0:
            raise ValidationError("mu_factor must be > 1")
        if self.line_search_steps < 1:
            raise ValidationError("line_search_steps must be >= 1")
        if not (self.fd_step > 0.0):
            raise ValidationError("fd_step must be > 0")
        if self.receding_iterations < 1:
            raise ValidationError("receding_iterations must be >= 1")


@dataclass(frozen=True)
class PlannerConfig:
    backend: str = "ps"
    horizon: int = 40
    seed: int = 0
    ps: PredictiveSamplingConfig = field(default_factory=PredictiveSamplingConfig)
    ilqg: IlqgConfig = field(default_factory=IlqgConfig)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValidationError(
                f"unknown planner backend '{self.backend}'; expected one of {BACKENDS}"
            )
        if self.horizon < 1:
            raise ValidationError(f"horizon must be >= 1, got {self.horizon}")

    def num_knots(self) -> int:
        return max(2, self.horizon // self.ps.knot_divisor)
