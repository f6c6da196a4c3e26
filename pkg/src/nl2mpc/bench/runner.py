"""The N x M evaluation protocol.

For each task the translator is queried N times; every response is executed
for M rollouts with per-rollout seeds.  A response that fails to translate
counts as zero success over all M rollouts, and a rollout that raises is
recorded as a failure with its cause.  Matrix cells are independent, so
tasks can run in parallel processes; assembly is keyed by task id.

Rollouts are cached within a task run: identical responses (same spec
checksums and durations) under the same seed reuse the recorded outcome,
and the deterministic iLQG backend additionally collapses across seeds.
"""

from __future__ import annotations

import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from nl2mpc.bench.checkers import check_success
from nl2mpc.bench.tasks import TaskDefinition, initial_state_for
from nl2mpc.errors import Nl2MpcError
from nl2mpc.planning.adapters import (
    manipulator_dynamics,
    quadruped_dynamics,
    spec_reward_model,
)
from nl2mpc.planning.config import PlannerConfig
from nl2mpc.planning.receding import Trajectory, receding_run
from nl2mpc.rewards.core import RewardSpec, spec_checksum, spec_from_json, spec_to_canonical_json


@dataclass(frozen=True)
class Translation:
    """One translator response: per-turn scripts, specs, and durations."""

    scripts: tuple[str, ...]
    specs: tuple[RewardSpec, ...]
    durations: tuple[float, ...]


@dataclass(frozen=True)
class ResponseRecord:
    scripts: tuple[str, ...]
    spec_checksums: tuple[str, ...]
    spec_json: tuple[str, ...]
    durations: tuple[float, ...]
    error: str                      # translation failure cause, "" when fine
    outcomes: tuple[bool, ...]      # one per rollout
    rollout_errors: tuple[str, ...]

    @property
    def success_rate(self) -> float:
        if not self.outcomes:
            return 0.0
        return sum(self.outcomes) / len(self.outcomes)


@dataclass(frozen=True)
class TaskResult:
    task_id: str
    responses: tuple[ResponseRecord, ...]


@dataclass(frozen=True)
class EvalMatrix:
    n: int
    m: int
    seed: int
    tasks: tuple[TaskResult, ...]

    def task(self, task_id: str) -> TaskResult:
        for tr in self.tasks:
            if tr.task_id == task_id:
                return tr
        raise KeyError(task_id)


def default_planner(embodiment: str) -> PlannerConfig:
    if embodiment == "quadruped":
        return PlannerConfig(backend="ilqg", horizon=40)
    return PlannerConfig(backend="ps", horizon=40)


def planner_for(task: TaskDefinition, base: PlannerConfig | None = None) -> PlannerConfig:
    cfg = base or default_planner(task.embodiment)
    if task.planner:
        cfg = replace(cfg, **task.planner)
    return cfg


def rollout_seed(base_seed: int, task_id: str, rollout_index: int) -> int:
    """Stable per-rollout seed: distinct across rollouts, shared across responses."""
    mix = zlib.crc32(task_id.encode("utf-8"))
    return (base_seed * 1_000_003 + mix + rollout_index) & 0x7FFFFFFF


def _dynamics(embodiment: str):
    if embodiment == "quadruped":
        return quadruped_dynamics()
    return manipulator_dynamics()


def run_rollout(
    task: TaskDefinition,
    specs,
    durations,
    cfg: PlannerConfig,
    seed: int,
) -> tuple[Trajectory, ...]:
    """Execute the per-turn specs sequentially from the task's initial state."""
    dyn = _dynamics(task.embodiment)
    x = initial_state_for(task)
    cfg = replace(cfg, seed=seed)
    rng = np.random.default_rng(seed)
    trajs = []
    for spec, duration in zip(specs, durations):
        model = spec_reward_model(spec, task.embodiment)
        traj = receding_run(dyn, lambda: model, x, duration, cfg, rng=rng)
        trajs.append(traj)
        x = traj.final_state
    return tuple(trajs)


def run_task_once(
    task: TaskDefinition,
    translation: Translation,
    cfg: PlannerConfig | None = None,
    seed: int = 0,
) -> tuple[bool, tuple[Trajectory, ...]]:
    """One translation, one rollout, one verdict; the single-cell path."""
    cfg = planner_for(task, cfg)
    trajs = run_rollout(task, translation.specs, translation.durations, cfg, seed)
    return check_success(task, trajs), trajs


def _run_task(task, translator, base_cfg, n, m, seed) -> TaskResult:
    cfg = planner_for(task, base_cfg)
    cache: dict = {}
    responses = []
    for i in range(n):
        try:
            tr = translator(task, i)
        except Nl2MpcError as e:
            responses.append(
                ResponseRecord(
                    scripts=(),
                    spec_checksums=(),
                    spec_json=(),
                    durations=(),
                    error=str(e),
                    outcomes=(False,) * m,
                    rollout_errors=("translation failed",) * m,
                )
            )
            continue
        checksums = tuple(spec_checksum(s) for s in tr.specs)
        outcomes = []
        errors = []
        for j in range(m):
            s = rollout_seed(seed, task.id, j)
            # the sampling backend is the only consumer of the seed
            key = (checksums, tr.durations, s if cfg.backend == "ps" else None)
            if key not in cache:
                try:
                    trajs = run_rollout(task, tr.specs, tr.durations, cfg, s)
                    cache[key] = (check_success(task, trajs), "")
                except Nl2MpcError as e:
                    cache[key] = (False, str(e))
            ok, err = cache[key]
            outcomes.append(ok)
            errors.append(err)
        responses.append(
            ResponseRecord(
                scripts=tr.scripts,
                spec_checksums=checksums,
                spec_json=tuple(spec_to_canonical_json(s) for s in tr.specs),
                durations=tr.durations,
                error="",
                outcomes=tuple(outcomes),
                rollout_errors=tuple(errors),
            )
        )
    return TaskResult(task_id=task.id, responses=tuple(responses))


def run_benchmark(
    tasks,
    translator,
    planner: PlannerConfig | None = None,
    n: int = 10,
    m: int = 50,
    seed: int = 0,
    jobs: int = 1,
    progress=None,
) -> EvalMatrix:
    """Run the protocol over `tasks` and assemble the matrix in input order."""
    tasks = list(tasks)
    results: dict[str, TaskResult] = {}
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(_run_task, task, translator, planner, n, m, seed): task.id
                for task in tasks
            }
            for fut, tid in futures.items():
                results[tid] = fut.result()
                if progress is not None:
                    progress(results[tid])
    else:
        for task in tasks:
            results[task.id] = _run_task(task, translator, planner, n, m, seed)
            if progress is not None:
                progress(results[task.id])
    return EvalMatrix(n=n, m=m, seed=seed, tasks=tuple(results[t.id] for t in tasks))


def matrix_to_json(matrix: EvalMatrix) -> str:
    payload = {
        "n": matrix.n,
        "m": matrix.m,
        "seed": matrix.seed,
        "tasks": [
            {
                "task_id": tr.task_id,
                "responses": [
                    {
                        "scripts": list(r.scripts),
                        "spec_checksums": list(r.spec_checksums),
                        "spec_json": list(r.spec_json),
                        "durations": list(r.durations),
                        "error": r.error,
                        "outcomes": list(r.outcomes),
                        "rollout_errors": list(r.rollout_errors),
                        "success_rate": r.success_rate,
                    }
                    for r in tr.responses
                ],
            }
            for tr in matrix.tasks
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def matrix_from_json(text: str) -> EvalMatrix:
    raw = json.loads(text)
    tasks = []
    for t in raw["tasks"]:
        responses = tuple(
            ResponseRecord(
                scripts=tuple(r["scripts"]),
                spec_checksums=tuple(r["spec_checksums"]),
                spec_json=tuple(r["spec_json"]),
                durations=tuple(r["durations"]),
                error=r["error"],
                outcomes=tuple(bool(o) for o in r["outcomes"]),
                rollout_errors=tuple(r["rollout_errors"]),
            )
            for r in t["responses"]
        )
        tasks.append(TaskResult(task_id=t["task_id"], responses=responses))
    return EvalMatrix(n=raw["n"], m=raw["m"], seed=raw["seed"], tasks=tuple(tasks))


def specs_from_record(record: ResponseRecord) -> tuple[RewardSpec, ...]:
    return tuple(spec_from_json(s) for s in record.spec_json)
