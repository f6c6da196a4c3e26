"""Pass-rate estimation over evaluation matrices.

pass@k is the unbiased estimator 1 - C(n-c, k) / C(n, k): the probability
that a uniformly drawn size-k subset of the n recorded responses contains at
least one response that solved the task.  A response solves a task when its
rollout success rate reaches the response-success threshold (default 0.5; a
declared policy, exposed as a parameter).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from nl2mpc.errors import ValidationError

DEFAULT_RESPONSE_THRESHOLD = 0.5


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that a random size-k subset of n responses contains a solver."""
    if not (0 <= c <= n):
        raise ValidationError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not (1 <= k <= n):
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    return 1.0 - math.comb(n - c, k) / math.comb(n, k)


def _solved_counts(matrix, threshold: float) -> dict:
    return {
        tr.task_id: sum(1 for r in tr.responses if r.success_rate >= threshold)
        for tr in matrix.tasks
    }


@dataclass(frozen=True)
class PassRateReport:
    k: int
    threshold: float
    per_task: dict          # task id -> pass@k
    aggregate: float        # mean over tasks


def pass_rate(matrix, threshold: float = DEFAULT_RESPONSE_THRESHOLD, k: int = 1) -> PassRateReport:
    """pass@k per task and the mean over tasks."""
    counts = _solved_counts(matrix, threshold)
    per_task = {tid: pass_at_k(matrix.n, c, k) for tid, c in counts.items()}
    aggregate = sum(per_task.values()) / len(per_task) if per_task else 0.0
    return PassRateReport(k=k, threshold=threshold, per_task=per_task, aggregate=aggregate)


def pass_rate_curves(matrix, threshold: float = DEFAULT_RESPONSE_THRESHOLD) -> dict:
    """k -> PassRateReport for every k in 1..N."""
    return {k: pass_rate(matrix, threshold=threshold, k=k) for k in range(1, matrix.n + 1)}


def write_pass_rate_csv(matrix, path, threshold: float = DEFAULT_RESPONSE_THRESHOLD) -> None:
    """One row per task plus an aggregate row; one column per k."""
    curves = pass_rate_curves(matrix, threshold=threshold)
    ks = sorted(curves)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["task"] + [f"pass@{k}" for k in ks])
        for tr in matrix.tasks:
            writer.writerow(
                [tr.task_id] + [f"{curves[k].per_task[tr.task_id]:.6f}" for k in ks]
            )
        writer.writerow(["aggregate"] + [f"{curves[k].aggregate:.6f}" for k in ks])
