"""Interactive synthesis sessions.

A session owns a conversation with the translator and a persistent robot
state: each instruction is translated into a reward spec (carrying over the
previous turn's spec unless the script resets it), executed by the receding
horizon controller from wherever the robot currently is, and appended as a
turn.  The robot never auto-resets between turns; `reset` exists for an
explicit fresh start.

One turn may run at a time.  Frame and diagnostic events stream to the
session's bus while the executor runs; a spec swapped in mid-run via
`swap_spec` takes effect at the next control-step boundary.

Sessions persist as a directory: one canonical JSON document plus one
replay file per turn, both integrity-checksummed.  Loading re-parses the
stored descriptor and script texts, so a loaded session continues exactly
where the saved one stopped.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import pathlib
import threading
import time
import uuid

import numpy as np

from nl2mpc.config import (
    default_planner_config,
    default_scene_name,
    embodiment_config,
    load_config,
)
from nl2mpc.errors import BusyError, ChecksumError, ValidationError, VersionError
from nl2mpc.planning.adapters import (
    manipulator_dynamics,
    quadruped_dynamics,
    spec_reward_model,
)
from nl2mpc.planning.config import PlannerConfig
from nl2mpc.planning.receding import Trajectory, receding_run
from nl2mpc.rewards.core import (
    RewardSpec,
    spec_checksum,
    spec_from_json,
    spec_to_canonical_json,
)
from nl2mpc.scenes import manipulator_scene, scene_initial_state, validate_scene
from nl2mpc.service.events import EventBus
from nl2mpc.service.replay import (
    ReplayFile,
    read_replay,
    replay_from_turn,
    write_replay,
)
from nl2mpc.translate.descriptor import parse_motion_description
from nl2mpc.translate.pipeline import TurnArtifacts, translate
from nl2mpc.translate.interpret import call_whitelist
from nl2mpc.translate.script import parse_reward_script

SESSION_FORMAT_VERSION = 1


@dataclasses.dataclass(frozen=True)
class SessionConfig:
    planner: PlannerConfig | None = None   # None: embodiment default
    seed: int = 0
    frame_stride: int = 1
    buffer_size: int = 256
    max_retries: int = 2

    def __post_init__(self):
        if self.frame_stride < 1:
            raise ValidationError(f"frame_stride must be >= 1, got {self.frame_stride}")
        if self.max_retries < 0:
            raise ValidationError(f"max_retries must be >= 0, got {self.max_retries}")


@dataclasses.dataclass(frozen=True)
class Turn:
    index: int
    artifacts: TurnArtifacts
    trajectory: Trajectory
    seed: int
    started_at: float
    finished_at: float


def turn_seed(base_seed: int, turn_index: int) -> int:
    """Per-turn planner seed; stable under replay and across reloads."""
    return (base_seed * 1_000_003 + turn_index) & 0x7FFFFFFF


class Session:
    def __init__(
        self,
        embodiment: str,
        scene: str,
        config: SessionConfig | None = None,
        client=None,
        clock=time.time,
        session_id: str | None = None,
    ):
        validate_scene(embodiment, scene)
        self.id = session_id or uuid.uuid4().hex[:12]
        self.embodiment = embodiment
        self.scene = scene
        cfg = config or SessionConfig()
        if cfg.planner is None:
            cfg = dataclasses.replace(cfg, planner=default_planner_config(embodiment))
        self.config = cfg
        self.client = client
        self.clock = clock
        self.embodiment_cfg = embodiment_config(embodiment)
        self._scene_obj = manipulator_scene(scene) if embodiment == "manipulator" else None
        self._dyn = (
            quadruped_dynamics(self.embodiment_cfg)
            if embodiment == "quadruped"
            else manipulator_dynamics(self.embodiment_cfg, scene=self._scene_obj)
        )
        self.turns: list[Turn] = []
        self.spec = RewardSpec(terms=())
        self.state = scene_initial_state(embodiment, scene, self.embodiment_cfg)
        self.bus = EventBus(buffer_size=cfg.buffer_size)
        self.pending: TurnArtifacts | None = None
        self._flight = threading.Lock()
        self._live_model = None
        self._live_spec = None
        self._spec_registry: dict[str, RewardSpec] = {}

    # ------------------------------------------------------------ queries

    @property
    def busy(self) -> bool:
        return self._flight.locked()

    def history(self) -> list[TurnArtifacts]:
        return [t.artifacts for t in self.turns]

    # ------------------------------------------------------- turn running

    def _acquire(self):
        if not self._flight.acquire(blocking=False):
            raise BusyError(f"session {self.id} already has a turn in flight")

    def instruct(self, text: str) -> Turn:
        """Translate and execute one instruction."""
        self._acquire()
        try:
            artifacts = self._translate(text)
            return self._execute(artifacts)
        finally:
            self._flight.release()

    def translate_only(self, text: str) -> TurnArtifacts:
        """Stage a turn for review; nothing executes until `execute_pending`."""
        self._acquire()
        try:
            self.pending = self._translate(text)
            return self.pending
        finally:
            self._flight.release()

    def execute_pending(self) -> Turn:
        self._acquire()
        try:
            if self.pending is None:
                raise ValidationError(f"session {self.id} has no staged turn to execute")
            artifacts, self.pending = self.pending, None
            return self._execute(artifacts)
        finally:
            self._flight.release()

    def _translate(self, text: str) -> TurnArtifacts:
        if self.client is None:
            raise ValidationError(f"session {self.id} has no completion client")
        self.bus.publish("turn-started", turn=len(self.turns), instruction=text)
        try:
            artifacts = translate(
                text,
                self.history(),
                self.client,
                self.embodiment,
                base_spec=self.spec,
                max_retries=self.config.max_retries,
            )
        except Exception as e:
            self.bus.publish("turn-failed", turn=len(self.turns), error=str(e))
            raise
        self.bus.publish(
            "turn-translated",
            turn=len(self.turns),
            spec_checksum=spec_checksum(artifacts.spec),
            plan_duration=artifacts.plan_duration,
        )
        return artifacts

    def swap_spec(self, spec: RewardSpec) -> None:
        """Replace the live spec; takes effect at the next control step."""
        model = spec_reward_model(spec, self.embodiment, scene=self._scene_obj)
        self._spec_registry[spec_checksum(spec)] = spec
        self._live_spec = spec
        self._live_model = model

    def _execute(self, artifacts: TurnArtifacts) -> Turn:
        index = len(self.turns)
        seed = turn_seed(self.config.seed, index)
        cfg = dataclasses.replace(self.config.planner, seed=seed)
        self.swap_spec(artifacts.spec)
        stride = self.config.frame_stride
        count = 0

        def on_frame(frame):
            nonlocal count
            if count % stride == 0:
                self.bus.publish(
                    "frame",
                    turn=index,
                    t=frame.t,
                    state=np.asarray(frame.state).tolist(),
                    reward=frame.reward,
                    spec_checksum=frame.spec_checksum,
                )
            count += 1

        def on_diag(diag):
            self.bus.publish("diagnostics", turn=index, **diag)

        started = self.clock()
        try:
            trajectory = receding_run(
                self._dyn,
                lambda: self._live_model,
                self.state,
                artifacts.plan_duration,
                cfg,
                rng=np.random.default_rng(seed),
                on_frame=on_frame,
                on_diagnostics=on_diag,
            )
        except Exception as e:
            # the turn aborts whole: no state change, nothing appended
            self.bus.publish("turn-failed", turn=index, error=str(e))
            raise
        turn = Turn(
            index=index,
            artifacts=artifacts,
            trajectory=trajectory,
            seed=seed,
            started_at=started,
            finished_at=self.clock(),
        )
        self.turns.append(turn)
        self.state = np.asarray(trajectory.final_state, dtype=float).copy()
        self.spec = self._live_spec
        self.bus.publish(
            "turn-finished",
            turn=index,
            frames=len(trajectory.frames),
            final_state=self.state.tolist(),
            spec_checksum=spec_checksum(self.spec),
        )
        return turn

    def reset(self) -> None:
        """Robot back to the scene's initial state, spec cleared.  The turn
        history stays; only the physical situation restarts."""
        self._acquire()
        try:
            self.state = scene_initial_state(self.embodiment, self.scene, self.embodiment_cfg)
            self.spec = RewardSpec(terms=())
            self.pending = None
            self.bus.publish("reset", state=self.state.tolist())
        finally:
            self._flight.release()

    # -------------------------------------------------------- persistence

    def turn_replay(self, index: int) -> ReplayFile:
        try:
            turn = self.turns[index]
        except IndexError:
            raise ValidationError(
                f"session {self.id} has {len(self.turns)} turns, no index {index}"
            ) from None
        cfg = dataclasses.replace(self.config.planner, seed=turn.seed)
        checksums = {f.spec_checksum for f in turn.trajectory.frames}
        specs = [
            self._spec_registry.get(c) or _require_spec(turn, c) for c in sorted(checksums)
        ]
        return replay_from_turn(
            self.embodiment,
            self.scene,
            cfg,
            self.embodiment_cfg,
            specs,
            turn.trajectory,
        )


def _require_spec(turn: Turn, checksum: str) -> RewardSpec:
    if spec_checksum(turn.artifacts.spec) == checksum:
        return turn.artifacts.spec
    raise ValidationError(f"no stored spec with checksum {checksum}")


def create_session(
    embodiment: str,
    scene: str | None = None,
    config: SessionConfig | None = None,
    client=None,
    clock=time.time,
) -> Session:
    if scene is None:
        scene = default_scene_name(embodiment, load_config())
    return Session(embodiment, scene, config=config, client=client, clock=clock)


# ---------------------------------------------------------------- save/load


def _canonical_bytes(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _session_document(session: Session) -> dict:
    doc = {
        "version": SESSION_FORMAT_VERSION,
        "id": session.id,
        "embodiment": session.embodiment,
        "scene": session.scene,
        "seed": session.config.seed,
        "frame_stride": session.config.frame_stride,
        "buffer_size": session.config.buffer_size,
        "max_retries": session.config.max_retries,
        "planner": dataclasses.asdict(session.config.planner),
        "spec": json.loads(spec_to_canonical_json(session.spec)),
        "state": session.state.tolist(),
        "turns": [
            {
                "index": t.index,
                "instruction": t.artifacts.instruction,
                "descriptor_prompt": t.artifacts.descriptor_prompt,
                "descriptor_text": t.artifacts.descriptor_text,
                "coder_prompt": t.artifacts.coder_prompt,
                "script_text": t.artifacts.script_text,
                "descriptor_retries": t.artifacts.descriptor_retries,
                "coder_retries": t.artifacts.coder_retries,
                "spec": json.loads(spec_to_canonical_json(t.artifacts.spec)),
                "plan_duration": t.artifacts.plan_duration,
                "seed": t.seed,
                "started_at": t.started_at,
                "finished_at": t.finished_at,
                "replay": f"turn{t.index}.replay.json",
            }
            for t in session.turns
        ],
    }
    doc["sha256"] = hashlib.sha256(_canonical_bytes(doc)).hexdigest()
    return doc


def save_session(session: Session, path) -> pathlib.Path:
    """Write the session as a directory; returns its path."""
    root = pathlib.Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for turn in session.turns:
        write_replay(session.turn_replay(turn.index), root / f"turn{turn.index}.replay.json")
    doc = _session_document(session)
    (root / "session.json").write_text(
        json.dumps(doc, sort_keys=True, separators=(",", ":"))
    )
    return root


def _rebuild_artifacts(turn_doc: dict, embodiment: str, base_spec: RewardSpec) -> TurnArtifacts:
    description = parse_motion_description(turn_doc["descriptor_text"], embodiment)
    script = parse_reward_script(turn_doc["script_text"], call_whitelist(embodiment))
    spec = spec_from_json(json.dumps(turn_doc["spec"]))
    return TurnArtifacts(
        instruction=turn_doc["instruction"],
        descriptor_prompt=turn_doc["descriptor_prompt"],
        descriptor_text=turn_doc["descriptor_text"],
        description=description,
        coder_prompt=turn_doc["coder_prompt"],
        script_text=turn_doc["script_text"],
        script=script,
        spec=spec,
        plan_duration=float(turn_doc["plan_duration"]),
        descriptor_retries=int(turn_doc["descriptor_retries"]),
        coder_retries=int(turn_doc["coder_retries"]),
    )


def load_session(path, client=None, clock=time.time) -> Session:
    root = pathlib.Path(path)
    doc_path = root / "session.json"
    if not doc_path.exists():
        raise ValidationError(f"{root} is not a session directory (no session.json)")
    try:
        doc = json.loads(doc_path.read_text())
    except json.JSONDecodeError as e:
        raise ChecksumError(f"session document is not valid JSON (truncated?): {e}") from e
    if not isinstance(doc, dict) or "sha256" not in doc:
        raise ChecksumError("session document has no integrity checksum")
    stated = doc.pop("sha256")
    actual = hashlib.sha256(_canonical_bytes(doc)).hexdigest()
    if stated != actual:
        raise ChecksumError(
            f"session checksum mismatch: file says {stated}, content is {actual}"
        )
    if doc.get("version") != SESSION_FORMAT_VERSION:
        raise VersionError(
            f"session format version {doc.get('version')} is not supported "
            f"(expected {SESSION_FORMAT_VERSION})"
        )
    from nl2mpc.config import planner_from_doc

    config = SessionConfig(
        planner=planner_from_doc(doc["planner"]),
        seed=doc["seed"],
        frame_stride=doc["frame_stride"],
        buffer_size=doc["buffer_size"],
        max_retries=doc["max_retries"],
    )
    session = Session(
        doc["embodiment"],
        doc["scene"],
        config=config,
        client=client,
        clock=clock,
        session_id=doc["id"],
    )
    base = RewardSpec(terms=())
    for turn_doc in doc["turns"]:
        artifacts = _rebuild_artifacts(turn_doc, doc["embodiment"], base)
        replay = read_replay(root / turn_doc["replay"])
        trajectory = Trajectory(
            frames=replay.frames,
            final_state=replay.final_state,
            dt=replay.dt,
            backend=replay.backend,
            seed=replay.seed,
        )
        turn = Turn(
            index=turn_doc["index"],
            artifacts=artifacts,
            trajectory=trajectory,
            seed=turn_doc["seed"],
            started_at=turn_doc["started_at"],
            finished_at=turn_doc["finished_at"],
        )
        session.turns.append(turn)
        session._spec_registry[spec_checksum(artifacts.spec)] = artifacts.spec
        base = artifacts.spec
    session.spec = spec_from_json(json.dumps(doc["spec"]))
    session.state = np.asarray(doc["state"], dtype=float)
    return session
