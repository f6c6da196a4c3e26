"""End-to-end acceptance gates.

Each test here states a releasable guarantee at full scale: oracle
agreement for the reward algebra and planners, golden transcript coverage
for the translator, sandbox escape resistance, estimator exactness, the
offline 17-task benchmark, the full evaluation protocol through the real
CLI, and multi-turn session continuity with bitwise replay.
"""

from __future__ import annotations

import json
import pathlib
import random
import string
import subprocess
import sys
import time

import numpy as np
import pytest

import oracles
from conftest import random_features, random_spec
from nl2mpc.bench import (
    TASKS,
    fixture_translator,
    matrix_to_json,
    pass_at_k,
    run_benchmark,
)
from nl2mpc.errors import ScriptError, StructureError
from nl2mpc.planning import PlannerConfig, PredictiveSamplingConfig, ilqg_plan, ps_plan
from nl2mpc.rewards.core import eval_reward, spec_to_canonical_json
from nl2mpc.service import Session, SessionConfig, replay_trajectory
from nl2mpc.translate.client import MockCompletionClient
from nl2mpc.translate.interpret import call_whitelist, interpret_script
from nl2mpc.translate.script import parse_reward_script

from test_planning import integrator_1d, lqr_reward, point_mass, target_reward

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture(relpath: str) -> str:
    return (FIXTURES / relpath).read_text()


# ---------------------------------------------------------------- rewards


def test_reward_oracle_thousand_random_specs_under_five_seconds():
    rnd = random.Random(514229)
    start = time.perf_counter()
    for case in range(1000):
        embodiment = rnd.choice(["quadruped", "manipulator"])
        spec = random_spec(rnd, embodiment)
        feats = random_features(rnd, embodiment)
        got = eval_reward(spec, feats)
        want = oracles.eval_reward([t.to_json() for t in spec.terms], feats)
        assert got <= 0.0
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)
    assert time.perf_counter() - start < 5.0


# ---------------------------------------------------------------- planners


def test_ilqg_matches_riccati_within_1e6_under_one_second():
    dt, horizon = 0.1, 20
    start = time.perf_counter()
    result = ilqg_plan(
        integrator_1d(dt),
        lqr_reward(),
        np.array([1.0]),
        np.zeros((horizon, 1)),
        PlannerConfig(backend="ilqg", horizon=horizon),
    )
    elapsed = time.perf_counter() - start
    want = oracles.lqr_actions([[1.0]], [[dt]], [[1.0]], [[0.1]], [1.0], horizon)
    assert np.abs(result.actions - want.reshape(horizon, 1)).max() <= 1e-6
    assert elapsed < 1.0


def test_ps_elitism_holds_for_one_hundred_seeds():
    dyn = point_mass()
    rew = target_reward()
    cfg = PlannerConfig(backend="ps", horizon=20)
    for seed in range(100):
        rng = np.random.default_rng(seed)
        nominal = np.zeros((20, 1))
        best = None
        for _ in range(6):
            result = ps_plan(dyn, rew, np.zeros(2), nominal, cfg, rng)
            if best is not None:
                assert result.J >= best      # elitism: never worse, exactly
            best = result.J
            nominal = result.actions


def test_ps_zero_noise_returns_nominal_bitwise():
    cfg = PlannerConfig(
        backend="ps",
        horizon=16,
        ps=PredictiveSamplingConfig(num_samples=4, noise_scale=0.0),
    )
    nominal = np.linspace(-0.8, 0.9, 16)[:, None]
    result = ps_plan(
        point_mass(), target_reward(), np.zeros(2), nominal, cfg,
        np.random.default_rng(123),
    )
    assert np.array_equal(result.actions, nominal)


SMOOTH_QUAD_TERMS = (
    # residual families that are differentiable at generic states
    ("com_height", lambda r: {"target": r.uniform(0.1, 0.8)}),
    ("base_pitch", lambda r: {"target": r.uniform(-1.0, 1.0)}),
    ("base_roll", lambda r: {"target": r.uniform(-1.0, 1.0)}),
    ("com_xy", lambda r: {"target": (r.uniform(-1, 1), r.uniform(-1, 1))}),
    ("base_heading", lambda r: {"target": r.uniform(-1.0, 1.0)}),
    ("forward_velocity", lambda r: {"target": r.uniform(-1, 1)}),
    ("sideways_velocity", lambda r: {"target": r.uniform(-1, 1)}),
    ("yaw_speed", lambda r: {"target": r.uniform(-2, 2)}),
    ("foot_z", lambda r: {"foot": "front_left", "target": r.uniform(0.0, 0.5)}),
    ("foot_x", lambda r: {"foot": "back_right", "target": r.uniform(-0.3, 0.3), "home": 0.25}),
)


def _smooth_spec(rnd: random.Random):
    from nl2mpc.rewards.core import Norm, ResidualTerm, RewardSpec

    terms = []
    for i in range(rnd.randint(1, 5)):
        fn, make = rnd.choice(SMOOTH_QUAD_TERMS)
        kind = rnd.choice(["squared-l2", "smooth-abs"])
        norm = Norm(kind=kind, epsilon=0.1) if kind == "smooth-abs" else Norm(kind=kind)
        terms.append(
            ResidualTerm(
                id=f"{fn}.{i}",
                residual_fn=fn,
                params=make(rnd),
                weight=rnd.uniform(0.1, 5.0),
                norm=norm,
            )
        )
    return RewardSpec(terms=tuple(terms))


def test_ilqg_derivatives_match_central_differences_on_50_smooth_specs():
    from nl2mpc.planning.adapters import quadruped_dynamics, spec_reward_model
    from nl2mpc.planning.ilqg import _derivatives

    rnd = random.Random(832040)
    dyn = quadruped_dynamics()
    for case in range(50):
        spec = _smooth_spec(rnd)
        rew = spec_reward_model(spec, "quadruped")
        # generic states: angles well inside the wrap range
        X = np.array([
            [rnd.uniform(-0.5, 0.5) for _ in range(3)]        # xy, z-ish
            + [rnd.uniform(-0.4, 0.4) for _ in range(3)]      # roll pitch yaw
            + [rnd.uniform(-0.5, 0.5) for _ in range(3)]      # vels
            + [rnd.uniform(-0.3, 0.3) for _ in range(12)]     # feet
            + [rnd.uniform(0.1, 2.0)]                          # time
            for _ in range(3)
        ])
        U = np.array([[rnd.uniform(-0.3, 0.3) for _ in range(dyn.action_dim)]
                      for _ in range(3)])
        _, _, cx, cu, _, _, _ = _derivatives(dyn, rew, X, U, 1e-5)

        def cost(x, u):
            return -float(np.asarray(rew.reward(x, u)))

        h = 1e-6
        for t in range(3):
            for i in range(dyn.state_dim):
                e = np.zeros(dyn.state_dim)
                e[i] = h
                fd = (cost(X[t] + e, U[t]) - cost(X[t] - e, U[t])) / (2 * h)
                assert cx[t, i] == pytest.approx(fd, rel=1e-4, abs=1e-8)
            for i in range(dyn.action_dim):
                e = np.zeros(dyn.action_dim)
                e[i] = h
                fd = (cost(X[t], U[t] + e) - cost(X[t], U[t] - e)) / (2 * h)
                assert cu[t, i] == pytest.approx(fd, rel=1e-4, abs=1e-8)


# ------------------------------------------------------------- translator


GOLDEN_TRANSCRIPTS = [
    ("transcripts/biped_ours_1.txt", "quadruped", "biped_ours_1"),
    ("transcripts/biped_ours_3.txt", "quadruped", "biped_ours_3"),
    ("transcripts/faucet_ours_1.txt", "manipulator", "faucet_ours_1"),
    ("transcripts/faucet_ours_2.txt", "manipulator", "faucet_ours_2"),
    ("sessions/moonwalk/turn1.txt", "quadruped", "moonwalk_turn1"),
    ("sessions/moonwalk/turn2.txt", "quadruped", "moonwalk_turn2"),
    ("sessions/moonwalk/turn3.txt", "quadruped", "moonwalk_turn3"),
    ("sessions/moonwalk/turn4.txt", "quadruped", "moonwalk_turn4"),
    ("sessions/apple_drawer/turn1.txt", "manipulator", "apple_drawer_turn1"),
    ("sessions/apple_drawer/turn2.txt", "manipulator", "apple_drawer_turn2"),
    ("sessions/apple_drawer/turn3.txt", "manipulator", "apple_drawer_turn3"),
    ("sessions/apple_drawer/turn4.txt", "manipulator", "apple_drawer_turn4"),
]


@pytest.mark.parametrize("rel,embodiment,snapshot", GOLDEN_TRANSCRIPTS)
def test_golden_transcripts_interpret_to_reviewed_specs(rel, embodiment, snapshot):
    script = parse_reward_script(fixture(rel), call_whitelist(embodiment))
    spec, _ = interpret_script(script, embodiment)
    assert spec_to_canonical_json(spec) == fixture(f"snapshots/{snapshot}.json").strip()


def test_sample_without_execute_plan_reports_the_missing_call():
    with pytest.raises(StructureError) as err:
        parse_reward_script(
            fixture("transcripts/biped_ours_2.txt"), call_whitelist("quadruped")
        )
    assert "execute_plan" in str(err.value)


def test_sandbox_rejects_ten_thousand_fuzzed_names_with_zero_escapes():
    whitelist = call_whitelist("quadruped")
    rnd = random.Random(1346269)
    alphabet = string.ascii_lowercase + string.digits + "_"
    escapes = 0
    tried = 0
    while tried < 10_000:
        name = rnd.choice(string.ascii_lowercase + "_") + "".join(
            rnd.choice(alphabet) for _ in range(rnd.randint(0, 24))
        )
        if name in whitelist:
            continue
        tried += 1
        code = f"{name}()\nexecute_plan()"
        try:
            script = parse_reward_script(code, whitelist)
        except ScriptError:
            continue
        if any(call.name not in whitelist for call in script.calls()):
            escapes += 1
    assert escapes == 0


# ---------------------------------------------------------------- metrics


def test_pass_rate_estimator_agrees_with_exhaustive_enumeration():
    for n in range(1, 11):
        for c in range(0, n + 1):
            for k in range(1, n + 1):
                assert pass_at_k(n, c, k) == pytest.approx(
                    oracles.pass_at_k_exhaustive(n, c, k), abs=1e-12
                )
    # at k == n every task with at least one solving response passes
    for n in range(1, 11):
        for c in range(0, n + 1):
            assert pass_at_k(n, c, n) == (1.0 if c >= 1 else 0.0)


# -------------------------------------------------------- offline benchmark


def test_offline_benchmark_solves_at_least_15_of_17_tasks():
    outcomes = {}
    for task in TASKS.values():
        start = time.perf_counter()
        matrix = run_benchmark([task], fixture_translator, n=1, m=1, seed=0, jobs=1)
        elapsed = time.perf_counter() - start
        assert elapsed <= 60.0, f"{task.id} took {elapsed:.1f}s"
        record = matrix.tasks[0].responses[0]
        assert record.error == "", f"{task.id}: {record.error}"
        outcomes[task.id] = record.outcomes[0]
    solved = sum(outcomes.values())
    failed = sorted(tid for tid, ok in outcomes.items() if not ok)
    assert solved >= 15, f"solved {solved}/17; failed: {failed}"


@pytest.mark.parametrize("task_id", ["spin", "roll_over", "open_drawer"])
def test_offline_benchmark_is_deterministic_across_reruns(task_id):
    from nl2mpc.bench import get_task

    task = get_task(task_id)
    first = run_benchmark([task], fixture_translator, n=1, m=2, seed=5, jobs=1)
    second = run_benchmark([task], fixture_translator, n=1, m=2, seed=5, jobs=1)
    assert matrix_to_json(first) == matrix_to_json(second)


# -------------------------------------------------- full evaluation protocol


@pytest.mark.slow
def test_eval_protocol_full_shape_through_the_cli(tmp_path):
    start = time.monotonic()
    proc = subprocess.run(
        [
            sys.executable, "-m", "nl2mpc.cli", "eval",
            "--tasks", "all", "-N", "10", "-M", "50",
            "--mock", "--jobs", "8", "--seed", "0",
            "--out", str(tmp_path),
        ],
        capture_output=True,
        text=True,
        timeout=4 * 3600,
    )
    elapsed = time.monotonic() - start
    assert proc.returncode == 0, proc.stderr[-2000:]
    assert elapsed <= 4 * 3600
    matrix = json.loads((tmp_path / "matrix.json").read_text())
    assert matrix["n"] == 10 and matrix["m"] == 50
    assert len(matrix["tasks"]) == 17
    for task in matrix["tasks"]:
        assert len(task["responses"]) == 10
        for response in task["responses"]:
            assert len(response["outcomes"]) == 50
    csv_lines = (tmp_path / "pass_rate.csv").read_text().splitlines()
    assert csv_lines[0].split(",")[:2] == ["task", "pass@1"]
    assert len(csv_lines) == 1 + 17 + 1          # header, 17 tasks, aggregate
    assert csv_lines[-1].startswith("aggregate,")


# ------------------------------------------------------- session continuity


def test_apple_drawer_conversation_with_bitwise_replay():
    from nl2mpc.manipulator.dynamics import extract_features
    from nl2mpc.manipulator.scene import default_scene

    root = FIXTURES / "sessions" / "apple_drawer"
    completions = []
    for i in (1, 2, 3, 4):
        completions.append((root / f"turn{i}.descriptor.txt").read_text())
        completions.append((root / f"turn{i}.txt").read_text())
    session = Session(
        "manipulator",
        "tabletop",
        SessionConfig(seed=7),
        client=MockCompletionClient(completions),
        clock=lambda: 0.0,
    )
    instructions = [
        "Open the drawer.",
        "Put the apple inside the drawer.",
        "Move your arm away.",
        "Now close the drawer.",
    ]
    for text in instructions:
        session.instruct(text)

    scene = default_scene()
    after_turn_1 = extract_features(session.turns[0].trajectory.final_state, scene)
    assert after_turn_1["joint_drawer"] >= 0.9

    after_turn_2 = extract_features(session.turns[1].trajectory.final_state, scene)
    apple = np.array([after_turn_2[f"apple_{ax}"] for ax in "xyz"])
    center = np.array([after_turn_2[f"drawer_center_{ax}"] for ax in "xyz"])
    assert np.linalg.norm(apple - center) <= 0.1

    for turn in session.turns:
        redone = replay_trajectory(session.turn_replay(turn.index))
        original = turn.trajectory
        assert len(redone.frames) == len(original.frames)
        for a, b in zip(redone.frames, original.frames):
            assert np.array_equal(a.state, b.state)
            assert a.reward == b.reward
            assert a.spec_checksum == b.spec_checksum
        assert np.array_equal(redone.final_state, original.final_state)
