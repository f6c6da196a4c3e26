"""Curated offline completions for every benchmark task.

Each task ships one known-good completion pair per instruction turn
(stage-1 description, stage-2 script) under data/<task_id>/.  The mock
client replays them in the exact order the two-stage pipeline queries, and
cycles so any number of responses can be drawn.  fixture_translator runs
the real pipeline over those completions, so the offline path exercises
prompt rendering, parsing, and interpretation end to end.
"""

from __future__ import annotations

from importlib import resources

from nl2mpc.bench.runner import Translation
from nl2mpc.bench.tasks import TaskDefinition
from nl2mpc.errors import ConfigError
from nl2mpc.translate.client import MockCompletionClient
from nl2mpc.translate.pipeline import translate
from nl2mpc.translate.script import pretty


def _task_dir(task_id: str):
    root = resources.files("nl2mpc.bench").joinpath("data", task_id)
    if not root.is_dir():
        raise ConfigError(f"no fixture completions for task {task_id!r}")
    return root


def fixture_client(task: TaskDefinition, cyclic: bool = True) -> MockCompletionClient:
    """Mock client replaying the task's per-turn completions in pipeline order."""
    root = _task_dir(task.id)
    completions = []
    for turn in range(1, len(task.instructions) + 1):
        for stage in ("descriptor", "coder"):
            path = root.joinpath(f"turn{turn}.{stage}.txt")
            if not path.is_file():
                raise ConfigError(f"missing fixture completion {task.id}/turn{turn}.{stage}.txt")
            completions.append(path.read_text())
    return MockCompletionClient(completions, cyclic=cyclic)


def fixture_translator(task: TaskDefinition, response_index: int = 0) -> Translation:
    """Translate the task's instruction sequence against its fixtures."""
    client = fixture_client(task)
    history: list = []
    scripts, specs, durations = [], [], []
    base = None
    for instruction in task.instructions:
        artifacts = translate(instruction, history, client, task.embodiment, base_spec=base)
        history.append(artifacts)
        base = artifacts.spec
        scripts.append(pretty(artifacts.script))
        specs.append(artifacts.spec)
        durations.append(artifacts.plan_duration)
    return Translation(scripts=tuple(scripts), specs=tuple(specs), durations=tuple(durations))
