"""Self-describing trajectory recordings.

A replay holds everything needed to audit or reproduce one executed turn:
embodiment and scene names, the exact planner and physics parameters, every
reward spec the frames reference (keyed by checksum), and the frame stream
itself.  The whole document is integrity-checked by a sha256 over its
canonical JSON, so a truncated or edited file fails loudly instead of
loading partially.

Two consistency checks matter downstream: `recheck_rewards` re-evaluates
the stored specification at every frame and reports the worst deviation
from the recorded reward, and `replay_trajectory` re-runs the planner from
the first frame's state and reproduces the recording bitwise.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json

import numpy as np

from nl2mpc.config import planner_from_doc
from nl2mpc.errors import ChecksumError, ValidationError, VersionError
from nl2mpc.manipulator.config import ManipulatorConfig
from nl2mpc.planning.adapters import (
    manipulator_dynamics,
    quadruped_dynamics,
    spec_reward_model,
)
from nl2mpc.planning.config import PlannerConfig
from nl2mpc.planning.receding import Frame, Trajectory, receding_run
from nl2mpc.quadruped.config import QuadrupedConfig
from nl2mpc.rewards.core import RewardSpec, spec_checksum, spec_from_json, spec_to_canonical_json
from nl2mpc.scenes import validate_scene

REPLAY_VERSION = 1


@dataclasses.dataclass(frozen=True)
class ReplayFile:
    embodiment: str
    scene: str
    planner: dict                 # full planner parameter document
    embodiment_config: dict       # full physics parameter document
    specs: dict                   # spec checksum -> canonical spec document
    frames: tuple
    final_state: np.ndarray
    dt: float
    backend: str
    seed: int
    version: int = REPLAY_VERSION

    def config_checksum(self) -> str:
        doc = {"embodiment_config": self.embodiment_config, "planner": self.planner}
        return hashlib.sha256(_canonical_bytes(doc)).hexdigest()


def _canonical_bytes(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _config_doc(cfg) -> dict:
    doc = dataclasses.asdict(cfg)
    for k, v in doc.items():
        if isinstance(v, tuple):
            doc[k] = list(v)
    return doc


def _untuple(doc: dict) -> dict:
    return {k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()}


def replay_from_turn(
    embodiment: str,
    scene: str,
    planner_cfg: PlannerConfig,
    embodiment_cfg,
    specs,
    trajectory: Trajectory,
) -> ReplayFile:
    """Package one executed turn.  `specs` is every spec the frames may
    reference (one, unless the spec was swapped mid-run)."""
    validate_scene(embodiment, scene)
    spec_map = {spec_checksum(s): json.loads(spec_to_canonical_json(s)) for s in specs}
    missing = {f.spec_checksum for f in trajectory.frames} - set(spec_map)
    if missing:
        raise ValidationError(f"frames reference unknown spec checksums {sorted(missing)}")
    return ReplayFile(
        embodiment=embodiment,
        scene=scene,
        planner=dataclasses.asdict(planner_cfg),
        embodiment_config=_config_doc(embodiment_cfg),
        specs=spec_map,
        frames=trajectory.frames,
        final_state=np.asarray(trajectory.final_state, dtype=float),
        dt=trajectory.dt,
        backend=trajectory.backend,
        seed=trajectory.seed,
    )


def replay_document(replay: ReplayFile) -> dict:
    doc = {
        "version": replay.version,
        "embodiment": replay.embodiment,
        "scene": replay.scene,
        "planner": replay.planner,
        "embodiment_config": replay.embodiment_config,
        "config_checksum": replay.config_checksum(),
        "specs": replay.specs,
        "dt": replay.dt,
        "backend": replay.backend,
        "seed": replay.seed,
        "frames": [
            {
                "t": f.t,
                "state": np.asarray(f.state, dtype=float).tolist(),
                "action": np.asarray(f.action, dtype=float).tolist(),
                "reward": float(f.reward),
                "spec_checksum": f.spec_checksum,
            }
            for f in replay.frames
        ],
        "final_state": np.asarray(replay.final_state, dtype=float).tolist(),
    }
    doc["sha256"] = hashlib.sha256(_canonical_bytes(doc)).hexdigest()
    return doc


def replay_to_json(replay: ReplayFile) -> str:
    return json.dumps(replay_document(replay), sort_keys=True, separators=(",", ":"))


def replay_from_json(text: str) -> ReplayFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChecksumError(f"replay is not valid JSON (truncated?): {e}") from e
    if not isinstance(doc, dict) or "sha256" not in doc:
        raise ChecksumError("replay has no integrity checksum")
    stated = doc.pop("sha256")
    actual = hashlib.sha256(_canonical_bytes(doc)).hexdigest()
    if stated != actual:
        raise ChecksumError(f"replay checksum mismatch: file says {stated}, content is {actual}")
    version = doc.get("version")
    if version != REPLAY_VERSION:
        raise VersionError(f"replay version {version} is not supported (expected {REPLAY_VERSION})")
    frames = tuple(
        Frame(
            t=float(f["t"]),
            state=np.asarray(f["state"], dtype=float),
            action=np.asarray(f["action"], dtype=float),
            reward=float(f["reward"]),
            spec_checksum=f["spec_checksum"],
        )
        for f in doc["frames"]
    )
    replay = ReplayFile(
        embodiment=doc["embodiment"],
        scene=doc["scene"],
        planner=doc["planner"],
        embodiment_config=doc["embodiment_config"],
        specs=doc["specs"],
        frames=frames,
        final_state=np.asarray(doc["final_state"], dtype=float),
        dt=float(doc["dt"]),
        backend=doc["backend"],
        seed=int(doc["seed"]),
        version=version,
    )
    if doc["config_checksum"] != replay.config_checksum():
        raise ChecksumError("replay config checksum does not match its parameters")
    return replay


def write_replay(replay: ReplayFile, path) -> None:
    import pathlib

    pathlib.Path(path).write_text(replay_to_json(replay))


def read_replay(path) -> ReplayFile:
    import pathlib

    return replay_from_json(pathlib.Path(path).read_text())


def _spec_models(replay: ReplayFile) -> dict:
    scene = None
    if replay.embodiment == "manipulator":
        from nl2mpc.scenes import manipulator_scene

        scene = manipulator_scene(replay.scene)
    models = {}
    for checksum, doc in replay.specs.items():
        spec = spec_from_json(json.dumps(doc))
        if spec_checksum(spec) != checksum:
            raise ChecksumError(f"stored spec does not hash to its key {checksum}")
        models[checksum] = spec_reward_model(spec, replay.embodiment, scene=scene)
    return models


def recheck_rewards(replay: ReplayFile) -> float:
    """Re-evaluate each frame's reward from its stored spec; returns the
    largest absolute deviation from the recorded value."""
    models = _spec_models(replay)
    worst = 0.0
    for f in replay.frames:
        model = models[f.spec_checksum]
        again = float(model.reward(f.state, f.action))
        worst = max(worst, abs(again - f.reward))
    return worst


def _dynamics(replay: ReplayFile):
    if replay.embodiment == "quadruped":
        return quadruped_dynamics(QuadrupedConfig(**_untuple(replay.embodiment_config)))
    from nl2mpc.scenes import manipulator_scene

    return manipulator_dynamics(
        ManipulatorConfig(**_untuple(replay.embodiment_config)),
        scene=manipulator_scene(replay.scene),
    )


def replay_trajectory(replay: ReplayFile) -> Trajectory:
    """Re-run the recorded turn: same initial state, parameters, seed, and
    per-step spec sequence.  The result should match the recording bitwise."""
    if not replay.frames:
        raise ValidationError("replay has no frames to re-run")
    models = _spec_models(replay)
    order = [f.spec_checksum for f in replay.frames]
    cursor = iter(order)

    def provider():
        return models[next(cursor)]

    cfg = planner_from_doc(replay.planner)
    duration = len(replay.frames) * replay.dt
    rng = np.random.default_rng(replay.seed)
    return receding_run(
        _dynamics(replay), provider, replay.frames[0].state, duration, cfg, rng=rng
    )
