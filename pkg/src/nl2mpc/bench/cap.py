"""Primitive-skill baseline: plans written against a fixed motion API.

The baseline model emits ordinary-looking Python that calls a small set of
primitives (joint poses, walking, end-effector moves).  Scripts are parsed
with ast, checked against the primitive whitelist plus locally defined
helper functions, stripped of imports, and then executed in a namespace
that contains nothing but the primitives and a minimal numpy facade.

Primitives drive the same surrogate dynamics the planner uses, via direct
tracking controllers, so the resulting trajectories feed the same success
checkers.  Direct tracking deliberately favors the baseline: whatever pose
or velocity a script commands is pursued with no optimization error beyond
actuation limits.
"""

from __future__ import annotations

import ast
import math
import types

import numpy as np

from nl2mpc.errors import ParseError, ValidationError, WhitelistError
from nl2mpc.mathutil import wrap_angle
from nl2mpc.planning.receding import Frame, Trajectory
from nl2mpc.quadruped.config import FOOT_ALIASES, FOOT_HOME, FOOT_NAMES, QuadrupedConfig
from nl2mpc.quadruped.dynamics import nominal_stand, quad_step
from nl2mpc.manipulator.config import ManipulatorConfig
from nl2mpc.manipulator.dynamics import extract_features, initial_state, manip_step
from nl2mpc.manipulator.scene import JOINT_NAMES, default_scene
from nl2mpc.translate.prompts import load_asset, render_prompt
from nl2mpc.translate.script import extract_code

QUADRUPED_PRIMITIVES = frozenset(
    {"set_target_joint_angles", "walk", "head_towards", "execute_plan"}
)
MANIPULATOR_PRIMITIVES = frozenset(
    {
        "end_effector_to",
        "end_effector_open",
        "end_effector_close",
        "get_object_position",
        "get_normalized_joint_position",
        "reset",
    }
)

_GETTABLE_NAMES = (
    "apple",
    "banana",
    "bowl",
    "box",
    "drawer_handle",
    "faucet_handle",
    "drawer_center",
    "rest_position",
)

_NP_ATTRS = frozenset({"pi", "deg2rad", "radians", "clip", "array"})

_ALLOWED_NODES = (
    ast.Module,
    ast.Import,
    ast.ImportFrom,
    ast.alias,
    ast.FunctionDef,
    ast.arguments,
    ast.arg,
    ast.Return,
    ast.Assign,
    ast.Expr,
    ast.For,
    ast.Call,
    ast.keyword,
    ast.Attribute,
    ast.Subscript,
    ast.Name,
    ast.Constant,
    ast.List,
    ast.Tuple,
    ast.BinOp,
    ast.UnaryOp,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.USub,
    ast.UAdd,
    ast.Load,
    ast.Store,
)

MAX_PLAN_SECONDS = 60.0


def _np_facade():
    return types.SimpleNamespace(
        pi=math.pi,
        deg2rad=math.radians,
        radians=math.radians,
        clip=lambda v, lo, hi: min(max(v, lo), hi),
        array=lambda v: list(v),
    )


def parse_cap_script(text: str, primitives: frozenset) -> ast.Module:
    """Parse and whitelist-check a baseline script; returns an import-free tree."""
    code = extract_code(text)
    try:
        tree = ast.parse(code)
    except SyntaxError as e:
        raise ParseError(f"invalid syntax: {e.msg}", line=e.lineno) from e

    defined = {
        node.name for node in ast.walk(tree) if isinstance(node, ast.FunctionDef)
    }
    callable_names = primitives | defined
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ParseError(
                f"unsupported syntax: {type(node).__name__}",
                line=getattr(node, "lineno", None),
            )
        if isinstance(node, ast.Name) and node.id.startswith("_"):
            raise WhitelistError(f"illegal name '{node.id}'", line=node.lineno)
        if isinstance(node, ast.FunctionDef) and node.name.startswith("_"):
            raise WhitelistError(f"illegal name '{node.name}'", line=node.lineno)
        if isinstance(node, ast.Attribute):
            if not (
                isinstance(node.value, ast.Name)
                and node.value.id == "np"
                and node.attr in _NP_ATTRS
                and isinstance(node.ctx, ast.Load)
            ):
                raise WhitelistError(
                    f"illegal attribute access at line {node.lineno}", line=node.lineno
                )
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Name):
                if node.func.id not in callable_names:
                    raise WhitelistError(
                        f"call to '{node.func.id}' is not allowed; primitives are "
                        f"{', '.join(sorted(primitives))}",
                        line=node.lineno,
                    )
            elif not isinstance(node.func, ast.Attribute):
                raise ParseError(
                    "only plain function calls are allowed", line=node.lineno
                )
            if any(kw.arg is None for kw in node.keywords):
                raise ParseError("**kwargs is not allowed", line=node.lineno)

    tree.body = [
        stmt for stmt in tree.body if not isinstance(stmt, (ast.Import, ast.ImportFrom))
    ]
    return tree


def _require_vec3(name: str, value) -> list:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ValidationError(f"{name} expects [x, y, z], got {value!r}")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValidationError(f"{name} expects finite numbers, got {value!r}")
        out.append(float(v))
    return out


def _require_duration(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"plan duration must be a number, got {value!r}")
    d = float(value)
    if not (0.0 < d <= MAX_PLAN_SECONDS):
        raise ValidationError(f"plan duration must be in (0, {MAX_PLAN_SECONDS}], got {d}")
    return d


class QuadrupedCapRuntime:
    """Tracks joint-pose / velocity / heading commands on the quadruped."""

    # two-segment leg used to map joint angles to foot targets
    upper_len = 0.2
    lower_len = 0.2
    wheelbase = 0.5   # front-back shoulder distance
    track = 0.3       # left-right shoulder distance

    def __init__(self, cfg: QuadrupedConfig | None = None, yaw: float = 0.0):
        self.cfg = cfg or QuadrupedConfig()
        self.x = nominal_stand(self.cfg, yaw=yaw).to_vector()
        self.frames: list[Frame] = []
        self.call_log: list[tuple] = []
        # command state, all optional until a primitive sets it
        self.leg_angles: dict[str, tuple[float, float, float]] = {}
        self.velocity = (0.0, 0.0)
        self.turning = None
        self.heading = yaw

    def namespace(self) -> dict:
        return {
            "set_target_joint_angles": self.set_target_joint_angles,
            "walk": self.walk,
            "head_towards": self.head_towards,
            "execute_plan": self.execute_plan,
        }

    def set_target_joint_angles(self, leg_name, target_joint_angles):
        if not isinstance(leg_name, str) or leg_name not in FOOT_ALIASES:
            raise ValidationError(
                f"unknown leg '{leg_name}'; expected one of {sorted(FOOT_ALIASES)}"
            )
        angles = _require_vec3("target_joint_angles", target_joint_angles)
        if angles[2] < 0.0:
            raise ValidationError(f"knee angle must be >= 0, got {angles[2]}")
        self.leg_angles[FOOT_ALIASES[leg_name]] = tuple(angles)
        self.call_log.append(("set_target_joint_angles", leg_name, tuple(angles)))

    def walk(self, forward_speed, sideway_speed, turning_speed):
        for name, v in (
            ("forward_speed", forward_speed),
            ("sideway_speed", sideway_speed),
            ("turning_speed", turning_speed),
        ):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"walk: {name} must be a finite number, got {v!r}")
        self.velocity = (float(forward_speed), float(sideway_speed))
        # positive turning means turning right, which is a negative yaw rate
        self.turning = -float(turning_speed)
        self.call_log.append(("walk", self.velocity, float(turning_speed)))

    def head_towards(self, heading_direction):
        if (
            isinstance(heading_direction, bool)
            or not isinstance(heading_direction, (int, float))
            or not math.isfinite(heading_direction)
        ):
            raise ValidationError(
                f"head_towards: heading must be a finite number, got {heading_direction!r}"
            )
        self.heading = float(heading_direction)
        self.turning = None
        self.call_log.append(("head_towards", self.heading))

    def _foot_offsets(self, angles):
        """Map (abduction, hip, knee) to (dx, dy_outward, depth below shoulder)."""
        abd, hip, knee = angles
        ux, uz = -math.cos(hip), -math.sin(hip)
        # lower leg folds against the upper leg at knee = 0 and straightens
        # to continue it at knee = pi
        bx, bz = -ux, -uz
        dxl = bx * math.cos(knee) + bz * math.sin(knee)
        dzl = -bx * math.sin(knee) + bz * math.cos(knee)
        dx = self.upper_len * ux + self.lower_len * dxl
        dz = self.upper_len * uz + self.lower_len * dzl
        dy_out = math.sin(abd) * self.upper_len
        return dx, dy_out, max(-dz, 0.0)

    def _pose_targets(self):
        """Foot targets plus the torso pose implied by the commanded leg angles."""
        cfg = self.cfg
        depths = {}
        foot_targets = {}
        for foot in FOOT_NAMES:
            home_x, home_y = FOOT_HOME[foot]
            if foot in self.leg_angles:
                dx, dy_out, depth = self._foot_offsets(self.leg_angles[foot])
                out_sign = 1.0 if home_y > 0 else -1.0
                foot_targets[foot] = [home_x + dx, home_y + out_sign * dy_out, None]
                depths[foot] = depth
            else:
                foot_targets[foot] = [home_x, home_y, 0.0]
                depths[foot] = cfg.stand_height
        height = float(np.clip(np.mean(list(depths.values())), cfg.z_min, cfg.z_max))
        front = 0.5 * (depths["front_left"] + depths["front_right"])
        back = 0.5 * (depths["back_left"] + depths["back_right"])
        left = 0.5 * (depths["front_left"] + depths["back_left"])
        right = 0.5 * (depths["front_right"] + depths["back_right"])
        pitch = math.atan2(front - back, self.wheelbase)
        roll = math.atan2(left - right, self.track)
        for foot in FOOT_NAMES:
            if foot_targets[foot][2] is None:
                foot_targets[foot][2] = max(height - depths[foot], 0.0)
        return foot_targets, height, pitch, roll

    def execute_plan(self, plan_duration=2.0):
        duration = _require_duration(plan_duration)
        self.call_log.append(("execute_plan", duration))
        cfg = self.cfg
        steps = max(1, int(round(duration / cfg.dt)))
        foot_targets, height_t, pitch_t, roll_t = self._pose_targets()
        for _ in range(steps):
            x = self.x
            u = np.zeros(18)
            vx_t, vy_t = self.velocity
            u[0] = cfg.damping_linear * vx_t + 4.0 * (vx_t - x[6])
            u[1] = cfg.damping_linear * vy_t + 4.0 * (vy_t - x[7])
            u[2] = 5.0 * (height_t - x[2])
            u[3] = 5.0 * wrap_angle(roll_t - x[3])
            u[4] = 5.0 * wrap_angle(pitch_t - x[4])
            if self.turning is not None:
                wz_t = self.turning
            else:
                wz_t = float(np.clip(4.0 * wrap_angle(self.heading - x[5]), -3.0, 3.0))
            u[5] = cfg.damping_yaw * wz_t + 6.0 * (wz_t - x[8])
            for i, foot in enumerate(FOOT_NAMES):
                target = foot_targets[foot]
                for k in range(3):
                    u[6 + 3 * i + k] = 6.0 * (target[k] - x[9 + 3 * i + k])
            self._step(u)

    def _step(self, u):
        u = np.asarray(u, dtype=float)
        self.frames.append(
            Frame(
                t=len(self.frames) * self.cfg.dt,
                state=self.x.copy(),
                action=u.copy(),
                reward=0.0,
            )
        )
        self.x = quad_step(self.x, u, self.cfg)

    def trajectory(self) -> Trajectory:
        return Trajectory(
            frames=tuple(self.frames),
            final_state=self.x.copy(),
            dt=self.cfg.dt,
            backend="cap",
            seed=0,
        )


class ManipulatorCapRuntime:
    """Blocking end-effector primitives on the tabletop scene."""

    move_timeout = 4.0
    move_eps = 0.01
    grip_timeout = 1.0

    def __init__(self, cfg: ManipulatorConfig | None = None, scene=None):
        self.cfg = cfg or ManipulatorConfig()
        self.scene = scene or default_scene()
        self.x = initial_state(self.scene).to_vector()
        self.frames: list[Frame] = []
        self.call_log: list[tuple] = []

    def namespace(self) -> dict:
        return {
            "end_effector_to": self.end_effector_to,
            "end_effector_open": self.end_effector_open,
            "end_effector_close": self.end_effector_close,
            "get_object_position": self.get_object_position,
            "get_normalized_joint_position": self.get_normalized_joint_position,
            "reset": self.reset,
        }

    def end_effector_to(self, position_obj):
        target = np.asarray(_require_vec3("end_effector_to", position_obj))
        self.call_log.append(("end_effector_to", tuple(target)))
        steps = int(self.move_timeout / self.cfg.dt)
        for _ in range(steps):
            err = target - self.x[0:3]
            if np.linalg.norm(err) < self.move_eps:
                break
            u = np.zeros(5)
            u[0:3] = 6.0 * err
            self._step(u)

    def _drive_gripper(self, target: float):
        steps = int(self.grip_timeout / self.cfg.dt)
        for _ in range(steps):
            if abs(self.x[6] - target) < 0.01:
                break
            u = np.zeros(5)
            u[3] = 8.0 * (target - self.x[6])
            self._step(u)

    def end_effector_open(self):
        self.call_log.append(("end_effector_open",))
        self._drive_gripper(1.0)

    def end_effector_close(self):
        self.call_log.append(("end_effector_close",))
        self._drive_gripper(0.0)

    def get_object_position(self, obj_name):
        if obj_name not in _GETTABLE_NAMES:
            raise ValidationError(
                f"unknown object '{obj_name}'; expected one of {_GETTABLE_NAMES}"
            )
        self.call_log.append(("get_object_position", obj_name))
        feats = extract_features(self.x, self.scene)
        return [float(feats[f"{obj_name}_{ax}"]) for ax in "xyz"]

    def get_normalized_joint_position(self, joint_name):
        if joint_name not in JOINT_NAMES:
            raise ValidationError(
                f"unknown joint '{joint_name}'; expected one of {JOINT_NAMES}"
            )
        self.call_log.append(("get_normalized_joint_position", joint_name))
        return float(self.x[40] if joint_name == "drawer" else self.x[41])

    def reset(self):
        self.call_log.append(("reset",))
        self.x = initial_state(self.scene).to_vector()

    def _step(self, u):
        u = np.asarray(u, dtype=float)
        self.frames.append(
            Frame(
                t=len(self.frames) * self.cfg.dt,
                state=self.x.copy(),
                action=u.copy(),
                reward=0.0,
            )
        )
        self.x = manip_step(self.x, u, self.cfg, self.scene)

    def trajectory(self) -> Trajectory:
        return Trajectory(
            frames=tuple(self.frames),
            final_state=self.x.copy(),
            dt=self.cfg.dt,
            backend="cap",
            seed=0,
        )


def make_runtime(embodiment: str, yaw: float = 0.0):
    if embodiment == "quadruped":
        return QuadrupedCapRuntime(yaw=yaw)
    if embodiment == "manipulator":
        return ManipulatorCapRuntime()
    raise ValidationError(f"no baseline runtime for embodiment {embodiment!r}")


def run_cap_script(text: str, runtime) -> None:
    """Parse, whitelist-check, and execute one baseline completion."""
    primitives = (
        QUADRUPED_PRIMITIVES
        if isinstance(runtime, QuadrupedCapRuntime)
        else MANIPULATOR_PRIMITIVES
    )
    tree = parse_cap_script(text, primitives)
    code = compile(tree, "<cap-script>", "exec")
    namespace = {"__builtins__": {}, "np": _np_facade()}
    namespace.update(runtime.namespace())
    exec(code, namespace)


def run_cap_baseline(task, client) -> Trajectory:
    """Query the baseline prompt for each instruction and execute the scripts."""
    asset = load_asset(task.embodiment, "cap-baseline")
    yaw = math.pi / 2.0 if task.scene == "flat_facing_north" else 0.0
    runtime = make_runtime(task.embodiment, yaw=yaw)
    history: list[tuple[str, str]] = []
    for instruction in task.instructions:
        prompt = render_prompt(asset, instruction, history)
        completion = client.send(prompt)
        run_cap_script(completion, runtime)
        history.append((instruction, completion))
    return runtime.trajectory()
