"""Structured motion-description templates and their parser.

A description is a bracketed block of template lines with every NUM slot
replaced by a number and every CHOICE slot by one of its listed options.
Templates are written in a tiny slot syntax: `<NUM:name>` and
`<CHOICE:name:optionA|optionB>`.  Parsing matches each body line against the
templates leniently (any token in a slot position), then validates slot
kinds, choice membership, and numeric ranges, so errors can name the exact
line and slot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from nl2mpc.errors import ValidationError
from nl2mpc.quadruped.config import FOOT_NAMES

START_MARKERS = ("[start of description]", "[start of plan]")
END_MARKERS = ("[end of description]", "[end of plan]")

_SLOT_RE = re.compile(r"<(NUM|CHOICE):([a-z0-9_.]+)(?::([^>]+))?>")
_UNIT_RANGE_SLOTS = ("phase", "air_ratio")


@dataclass(frozen=True)
class SlotSpec:
    name: str
    kind: str                      # "NUM" or "CHOICE"
    choices: tuple[str, ...] = ()


@dataclass(frozen=True)
class TemplateLine:
    key: str
    text: str                      # with <NUM:...>/<CHOICE:...> slots
    optional: bool = False

    def slots(self) -> tuple[SlotSpec, ...]:
        out = []
        for kind, name, choices in _SLOT_RE.findall(self.text):
            out.append(
                SlotSpec(
                    name=name,
                    kind=kind,
                    choices=tuple(c.strip() for c in choices.split("|")) if choices else (),
                )
            )
        return tuple(out)

    def regex(self) -> re.Pattern:
        pattern = ""
        last = 0
        for m in _SLOT_RE.finditer(self.text):
            pattern += re.escape(self.text[last:m.start()]) + "(.+?)"
            last = m.end()
        pattern += re.escape(self.text[last:])
        return re.compile("^" + pattern + "$")


@dataclass(frozen=True)
class ResolvedSlot:
    slot: str
    kind: str
    value: object                  # float for NUM, str for CHOICE


@dataclass(frozen=True)
class MotionDescription:
    embodiment: str
    lines: tuple[str, ...]
    slots: tuple[ResolvedSlot, ...]
    present: frozenset

    def value(self, slot: str):
        for s in self.slots:
            if s.slot == slot:
                return s.value
        raise KeyError(slot)

    def has(self, key: str) -> bool:
        return key in self.present


def _quadruped_template() -> tuple[TemplateLine, ...]:
    lines = [
        TemplateLine(
            "torso_angles",
            "The torso of the robot should roll by <NUM:roll_degrees> degrees towards right, "
            "the torso should pitch upward at <NUM:pitch_degrees> degrees.",
        ),
        TemplateLine(
            "torso_height",
            "The height of the robot's CoM or torso center should be at <NUM:height> meters.",
        ),
        TemplateLine(
            "heading",
            "The robot should <CHOICE:heading_mode:face certain direction|turn at certain speed>. "
            "If facing certain direction, it should be facing <CHOICE:direction:east|south|north|west>. "
            "If turning, it should turn at <NUM:turn_rate_degrees> degrees/s.",
        ),
        TemplateLine(
            "locomotion",
            "The robot should <CHOICE:locomotion_mode:go to a certain location|move at certain speed>. "
            "If going to certain location, it should go to (x=<NUM:goal_x>, y=<NUM:goal_y>). "
            "If moving at certain speed, it should move forward at <NUM:forward_speed>m/s and "
            "sideways at <NUM:sideways_speed>m/s (positive means left).",
        ),
    ]
    for foot in FOOT_NAMES:
        lines.append(TemplateLine(
            f"lift.{foot}",
            f"{foot} foot lifted to <NUM:lift.{foot}> meters high.",
            optional=True,
        ))
    for foot in FOOT_NAMES:
        lines.append(TemplateLine(
            f"extend.{foot}",
            f"{foot} foot extend forward by <NUM:extend.{foot}> meters.",
            optional=True,
        ))
    for foot in FOOT_NAMES:
        lines.append(TemplateLine(
            f"inward.{foot}",
            f"{foot} foot shifts inward laterally by <NUM:inward.{foot}> meters.",
            optional=True,
        ))
    for foot in FOOT_NAMES:
        lines.append(TemplateLine(
            f"step.{foot}",
            f"{foot} foot steps on the ground at a frequency of <NUM:step.{foot}.frequency> Hz, "
            f"during the stepping motion, the foot will move <NUM:step.{foot}.up_down> meters up "
            f"and down, and <NUM:step.{foot}.forward_back> meters forward and back, drawing a "
            f"circle as if it's walking <CHOICE:step.{foot}.direction:forward|back>, spending "
            f"<NUM:step.{foot}.air_ratio> portion of the time in the air vs gait cycle.",
            optional=True,
        ))
    lines.append(TemplateLine(
        "phase_offsets",
        "The phase offsets for the four legs should be "
        "front_left: <NUM:phase.front_left>, back_left: <NUM:phase.back_left>, "
        "front_right: <NUM:phase.front_right>, back_right: <NUM:phase.back_right>.",
        optional=True,
    ))
    return tuple(lines)


_MANIP_OBJECTS = "apple|banana|box|bowl|drawer_handle|faucet_handle|drawer_center"


def _manipulator_template() -> tuple[TemplateLine, ...]:
    return (
        TemplateLine(
            "palm",
            "To perform this task, the manipulator's palm should move close to "
            f"<CHOICE:palm_target:{_MANIP_OBJECTS}|rest_position>.",
        ),
        TemplateLine(
            "pair",
            f"object1=<CHOICE:object1:{_MANIP_OBJECTS}> should be close to "
            f"object2=<CHOICE:object2:{_MANIP_OBJECTS}|nothing>.",
        ),
        TemplateLine(
            "rotate.object1",
            "object1 needs to be rotated by <NUM:rotate.object1> degrees along x axis.",
            optional=True,
        ),
        TemplateLine(
            "rotate.object2",
            "object2 needs to be rotated by <NUM:rotate.object2> degrees along x axis.",
            optional=True,
        ),
        TemplateLine(
            "lift.object1",
            "object1 needs to be lifted to a height of <NUM:lift.object1>m at the end.",
            optional=True,
        ),
        TemplateLine(
            "lift.object2",
            "object2 needs to be lifted to a height of <NUM:lift.object2>m at the end.",
            optional=True,
        ),
        TemplateLine(
            "joint",
            "object3=<CHOICE:object3:drawer|faucet> needs to be <CHOICE:joint_state:open|closed>.",
            optional=True,
        ),
    )


TEMPLATES = {
    "quadruped": _quadruped_template(),
    "manipulator": _manipulator_template(),
}


def descriptor_template(embodiment: str) -> tuple[TemplateLine, ...]:
    try:
        return TEMPLATES[embodiment]
    except KeyError:
        raise ValidationError(f"no descriptor template for embodiment {embodiment!r}") from None


def _extract_body(text: str) -> list[str]:
    start = end = None
    lines = text.splitlines()
    for i, line in enumerate(lines):
        stripped = line.strip()
        if start is None and stripped in START_MARKERS:
            start = i
        elif start is not None and stripped in END_MARKERS:
            end = i
            break
    if start is None:
        raise ValidationError(
            f"description missing start marker (one of {', '.join(START_MARKERS)})"
        )
    if end is None:
        raise ValidationError(
            f"description missing end marker (one of {', '.join(END_MARKERS)})"
        )
    return [ln.strip() for ln in lines[start + 1:end] if ln.strip()]


def parse_motion_description(text: str, embodiment: str) -> MotionDescription:
    """Validate a rendered description against the embodiment's template."""
    template = descriptor_template(embodiment)
    body = _extract_body(text)

    seen: dict[str, list[str]] = {}
    resolved: list[ResolvedSlot] = []
    for line_no, line in enumerate(body, start=1):
        matched = None
        for tline in template:
            m = tline.regex().match(line)
            if m is not None:
                matched = (tline, m)
                break
        if matched is None:
            raise ValidationError(f"line {line_no} does not match any template line: {line!r}")
        tline, m = matched
        if tline.key in seen:
            raise ValidationError(f"line {line_no} repeats template line {tline.key!r}")
        seen[tline.key] = list(m.groups())
        for spec, raw in zip(tline.slots(), m.groups()):
            raw = raw.strip()
            if spec.kind == "NUM":
                try:
                    value = float(raw)
                except ValueError:
                    raise ValidationError(
                        f"line {line_no}, slot {spec.name!r}: expected a number, got {raw!r}"
                    ) from None
                if any(tag in spec.name for tag in _UNIT_RANGE_SLOTS) and not (0.0 <= value <= 1.0):
                    raise ValidationError(
                        f"line {line_no}, slot {spec.name!r}: value {value} outside [0, 1]"
                    )
                resolved.append(ResolvedSlot(spec.name, "NUM", value))
            else:
                if raw not in spec.choices:
                    raise ValidationError(
                        f"line {line_no}, slot {spec.name!r}: {raw!r} is not one of "
                        f"{{{', '.join(spec.choices)}}}"
                    )
                resolved.append(ResolvedSlot(spec.name, "CHOICE", raw))

    missing = [t.key for t in template if not t.optional and t.key not in seen]
    if missing:
        raise ValidationError(f"description missing required line(s): {', '.join(missing)}")

    return MotionDescription(
        embodiment=embodiment,
        lines=tuple(body),
        slots=tuple(resolved),
        present=frozenset(seen),
    )
