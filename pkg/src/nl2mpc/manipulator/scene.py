"""Tabletop scene: object layout and articulated fixtures.

The scene holds everything positional that is not part of the dynamic state:
where objects start, where the drawer and faucet live, and how their joint
fractions map to handle poses.

Conventions:
  * the drawer is prismatic; its joint fraction q in [0, 1] slides the
    handle (and the drawer interior center) along the opening axis by
    q * travel from the closed pose
  * the faucet is a revolute valve about the x axis; q in [0, 1] maps to a
    rotation of q * pi/2 (q = 1 is the fully turned, 90 degree pose), and
    the grip point swings on an arm of radius arm_radius around the hub
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nl2mpc.errors import ValidationError

OBJECT_NAMES = ("apple", "banana", "box", "bowl")
SITE_NAMES = ("drawer_handle", "faucet_handle", "drawer_center", "rest_position")
# every name a distance reward may reference
POINT_NAMES = ("palm",) + OBJECT_NAMES + SITE_NAMES
# names that carry an orientation
ORIENTABLE_NAMES = OBJECT_NAMES + ("faucet_handle",)
JOINT_NAMES = ("drawer", "faucet")

SCENE_VERSION = 1


@dataclass(frozen=True)
class ObjectSpec:
    position: tuple[float, float, float]
    rotation: float = 0.0  # about the x axis, radians


@dataclass(frozen=True)
class Scene:
    name: str
    palm_start: tuple[float, float, float]
    rest_position: tuple[float, float, float]
    objects: dict  # name -> ObjectSpec, insertion order fixed
    drawer_handle_closed: tuple[float, float, float]
    drawer_center_closed: tuple[float, float, float]
    drawer_axis: tuple[float, float, float]
    drawer_travel: float
    faucet_hub: tuple[float, float, float]
    faucet_arm_radius: float
    version: int = SCENE_VERSION

    def __post_init__(self):
        if tuple(self.objects) != OBJECT_NAMES:
            raise ValidationError(
                f"scene must define objects {OBJECT_NAMES}, got {tuple(self.objects)}"
            )
        if not (self.drawer_travel > 0) or not (self.faucet_arm_radius > 0):
            raise ValidationError("drawer travel and faucet arm radius must be > 0")

    def drawer_handle_pos(self, q):
        """Handle position at joint fraction q; broadcasts over q."""
        q = np.asarray(q, dtype=float)[..., None]
        base = np.asarray(self.drawer_handle_closed)
        axis = np.asarray(self.drawer_axis)
        return base + q * self.drawer_travel * axis

    def drawer_center_pos(self, q):
        q = np.asarray(q, dtype=float)[..., None]
        base = np.asarray(self.drawer_center_closed)
        axis = np.asarray(self.drawer_axis)
        return base + q * self.drawer_travel * axis

    def faucet_grip_pos(self, q):
        """Grip point on the valve arm; starts pointing up, swings toward -y."""
        q = np.asarray(q, dtype=float)
        ang = q * (np.pi / 2.0)
        out = np.stack(
            [
                np.zeros_like(ang),
                -self.faucet_arm_radius * np.sin(ang),
                self.faucet_arm_radius * np.cos(ang),
            ],
            axis=-1,
        )
        return np.asarray(self.faucet_hub) + out

    def faucet_tangent(self, q):
        """Unit direction of grip motion for increasing q."""
        q = np.asarray(q, dtype=float)
        ang = q * (np.pi / 2.0)
        return np.stack(
            [np.zeros_like(ang), -np.cos(ang), -np.sin(ang)], axis=-1
        )

    @property
    def faucet_arc_length(self) -> float:
        return self.faucet_arm_radius * np.pi / 2.0


def default_scene() -> Scene:
    return Scene(
        name="tabletop",
        palm_start=(0.0, 0.0, 0.4),
        rest_position=(0.0, 0.0, 0.4),
        objects={
            "apple": ObjectSpec(position=(0.25, 0.15, 0.03), rotation=0.0),
            "banana": ObjectSpec(position=(0.25, -0.15, 0.03), rotation=float(np.pi / 2)),
            "box": ObjectSpec(position=(0.45, 0.2, 0.05), rotation=0.0),
            "bowl": ObjectSpec(position=(0.45, -0.2, 0.04), rotation=0.0),
        },
        drawer_handle_closed=(0.55, 0.0, 0.1),
        drawer_center_closed=(0.67, 0.0, 0.08),
        drawer_axis=(-1.0, 0.0, 0.0),
        drawer_travel=0.25,
        faucet_hub=(0.3, 0.35, 0.25),
        faucet_arm_radius=0.1,
    )
