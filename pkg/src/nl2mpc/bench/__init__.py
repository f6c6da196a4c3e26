"""Task benchmark: definitions, success checkers, and the N x M protocol."""

from nl2mpc.bench.cap import run_cap_baseline
from nl2mpc.bench.checkers import check_success
from nl2mpc.bench.fixtures import fixture_client, fixture_translator
from nl2mpc.bench.metrics import (
    PassRateReport,
    pass_at_k,
    pass_rate,
    pass_rate_curves,
    write_pass_rate_csv,
)
from nl2mpc.bench.runner import (
    EvalMatrix,
    ResponseRecord,
    TaskResult,
    default_planner,
    matrix_from_json,
    matrix_to_json,
    run_benchmark,
    run_task_once,
)
from nl2mpc.bench.tasks import TASKS, TaskDefinition, get_task, initial_state_for, task_ids

__all__ = [
    "TASKS",
    "TaskDefinition",
    "EvalMatrix",
    "TaskResult",
    "ResponseRecord",
    "PassRateReport",
    "check_success",
    "default_planner",
    "fixture_client",
    "fixture_translator",
    "get_task",
    "initial_state_for",
    "matrix_from_json",
    "matrix_to_json",
    "pass_at_k",
    "pass_rate",
    "pass_rate_curves",
    "run_benchmark",
    "run_cap_baseline",
    "run_task_once",
    "task_ids",
    "write_pass_rate_csv",
]
