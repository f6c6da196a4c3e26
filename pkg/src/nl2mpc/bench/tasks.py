"""The 17-task benchmark registry.

Nine quadruped tasks and eight manipulator tasks, each with its instruction
sequence, scene, success checker, and numeric thresholds.  The qualitative
behavior descriptions ("spin fast", "fully open") are pinned to the exact
numbers below so checkers are reproducible; every threshold is also exposed
on the task so configs can override them.

Multi-instruction tasks ("Lift paw higher", "Spin with lifted paws") run
their instructions as consecutive turns of one session: the reward spec
carries over between turns and the robot state persists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from nl2mpc.errors import UnknownTaskError, ValidationError

from nl2mpc.scenes import SCENES

QUADRUPED_SCENES = SCENES["quadruped"]
MANIPULATOR_SCENES = SCENES["manipulator"]


@dataclass(frozen=True)
class TaskDefinition:
    id: str
    embodiment: str
    instructions: tuple[str, ...]
    scene: str
    checker: str
    thresholds: dict = field(default_factory=dict)
    hold: float = 0.0               # seconds a condition must stay true
    planner: dict = field(default_factory=dict)   # per-task planner overrides

    def __post_init__(self):
        if self.embodiment not in ("quadruped", "manipulator"):
            raise ValidationError(f"unknown embodiment {self.embodiment!r}")
        if not self.instructions:
            raise ValidationError(f"task {self.id!r} has no instructions")
        scenes = QUADRUPED_SCENES if self.embodiment == "quadruped" else MANIPULATOR_SCENES
        if self.scene not in scenes:
            raise ValidationError(
                f"task {self.id!r}: scene {self.scene!r} not one of {scenes}"
            )
        if self.hold < 0:
            raise ValidationError(f"task {self.id!r}: hold must be >= 0")


def _quadruped_tasks() -> list[TaskDefinition]:
    return [
        TaskDefinition(
            id="facing_sunrise",
            embodiment="quadruped",
            instructions=(
                "It's early in the morning, make the robot head towards the sun.",
            ),
            scene="flat_facing_north",
            checker="heading",
            thresholds={"target": 0.0, "tolerance": math.radians(15.0)},
            hold=1.0,
        ),
        TaskDefinition(
            id="facing_sunset",
            embodiment="quadruped",
            instructions=(
                "It's late in the afternoon, make the robot head towards the sunset.",
            ),
            scene="flat_facing_north",
            checker="heading",
            thresholds={"target": math.pi, "tolerance": math.radians(15.0)},
            hold=1.0,
        ),
        TaskDefinition(
            id="sit_down",
            embodiment="quadruped",
            instructions=("Sit down low to ground with torso flat.",),
            scene="flat",
            checker="sit",
            thresholds={"max_height": 0.15, "max_tilt": math.radians(10.0)},
            hold=1.0,
        ),
        TaskDefinition(
            id="roll_over",
            embodiment="quadruped",
            instructions=("I want the robot to roll by 180 degrees.",),
            scene="flat",
            checker="rolled_over",
            thresholds={"max_up_z": -0.9},
            hold=0.5,
            # the wrapped-angle residual is discontinuous at the start pose;
            # sampling handles that cliff better than a local quadratic fit
            planner={"backend": "ps"},
        ),
        TaskDefinition(
            id="spin",
            embodiment="quadruped",
            instructions=("Spin fast.",),
            scene="flat",
            checker="spin",
            thresholds={"min_yaw_rate": 2.0},
            hold=1.0,
        ),
        TaskDefinition(
            id="lift_paw",
            embodiment="quadruped",
            instructions=("I want the robot to lift its front right paw in the air.",),
            scene="flat",
            checker="paw_height",
            thresholds={"foot": "front_right", "min_height": 0.1},
            hold=0.5,
        ),
        TaskDefinition(
            id="lift_paw_higher",
            embodiment="quadruped",
            instructions=(
                "I want the robot to lift its front right paw in the air.",
                "Lift it even higher.",
            ),
            scene="flat",
            checker="paw_higher",
            thresholds={"foot": "front_right", "margin": 0.05},
        ),
        TaskDefinition(
            id="spin_lifted_paws",
            embodiment="quadruped",
            instructions=(
                "Lift front left paw.",
                "Good, now lift diagonal paw as well.",
                "Good, in addition I want the robot to spin fast.",
            ),
            scene="flat",
            checker="spin_with_paws",
            thresholds={
                "feet": ("front_left", "back_right"),
                "min_height": 0.1,
                "min_yaw_rate": 2.0,
            },
            hold=1.0,
        ),
        TaskDefinition(
            id="biped_stand",
            embodiment="quadruped",
            instructions=("Make the robot stand upright on two back feet like a human.",),
            scene="flat",
            checker="biped",
            thresholds={
                "pitch_target": math.radians(90.0),
                "pitch_tolerance": math.radians(15.0),
                "min_height": 0.55,
            },
            hold=2.0,
        ),
    ]


def _manipulator_tasks() -> list[TaskDefinition]:
    return [
        TaskDefinition(
            id="touch_object",
            embodiment="manipulator",
            instructions=("Touch the apple",),
            scene="tabletop",
            checker="touch",
            thresholds={"object": "apple", "max_distance": 0.1},
        ),
        TaskDefinition(
            id="lift_object",
            embodiment="manipulator",
            instructions=("Lift the apple to 0.5m",),
            scene="tabletop",
            checker="objects_above",
            thresholds={"objects": ("apple",), "min_height": 0.4},
            hold=1.0,
        ),
        TaskDefinition(
            id="move_object",
            embodiment="manipulator",
            instructions=("Move the apple to the bowl",),
            scene="tabletop",
            checker="final_distance",
            thresholds={"object_a": "apple", "object_b": "bowl", "max_distance": 0.1},
        ),
        TaskDefinition(
            id="upright_object",
            embodiment="manipulator",
            instructions=("Place the banana upright",),
            scene="tabletop",
            checker="up_vector",
            thresholds={"object": "banana", "min_up_dot": 0.9},
        ),
        TaskDefinition(
            id="flip_object",
            embodiment="manipulator",
            instructions=("Flip the box",),
            scene="tabletop",
            checker="up_vector",
            thresholds={"object": "box", "max_up_dot": -0.9},
        ),
        TaskDefinition(
            id="lift_two_objects",
            embodiment="manipulator",
            instructions=("Lift the apple and banana at the same time.",),
            scene="tabletop",
            checker="objects_above",
            thresholds={"objects": ("apple", "banana"), "min_height": 0.4},
            hold=1.0,
        ),
        TaskDefinition(
            id="turn_faucet",
            embodiment="manipulator",
            instructions=("Turn on the faucet.",),
            scene="tabletop",
            checker="joint_open",
            thresholds={"joint": "faucet", "min_fraction": 0.9},
        ),
        TaskDefinition(
            id="open_drawer",
            embodiment="manipulator",
            instructions=("Open the drawer.",),
            scene="tabletop",
            checker="joint_open",
            thresholds={"joint": "drawer", "min_fraction": 0.9},
        ),
    ]


TASKS: dict[str, TaskDefinition] = {
    t.id: t for t in _quadruped_tasks() + _manipulator_tasks()
}


def task_ids() -> tuple[str, ...]:
    return tuple(TASKS)


def get_task(task_id: str) -> TaskDefinition:
    try:
        return TASKS[task_id]
    except KeyError:
        raise UnknownTaskError(
            f"unknown task {task_id!r}; expected one of {', '.join(TASKS)}"
        ) from None


def initial_state_for(task: TaskDefinition):
    """Initial state vector for the task's scene."""
    from nl2mpc.scenes import scene_initial_state

    return scene_initial_state(task.embodiment, task.scene)
