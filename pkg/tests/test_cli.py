"""Command-line interface: exit codes, outputs, determinism."""

from __future__ import annotations

import json
import pathlib
import socket

import pytest

from nl2mpc.bench import matrix_from_json
from nl2mpc.cli import main

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
SPIN = str(FIXTURES / "cli" / "spin")
GARBAGE = str(FIXTURES / "cli" / "garbage")


@pytest.fixture(autouse=True)
def no_ambient_endpoint(monkeypatch):
    monkeypatch.delenv("NL2MPC_COMPLETIONS_URL", raising=False)


def synth_args(out, extra=()):
    return [
        "synth", "quadruped", "Spin fast.",
        "--mock", SPIN, "--out", str(out), "--seed", "3", "--fixed-time", "0",
        *extra,
    ]


def test_synth_writes_session_and_prints_summary(tmp_path, capsys):
    assert main(synth_args(tmp_path / "run")) == 0
    out = capsys.readouterr().out
    assert "J = " in out
    assert "torso_yaw_rate" in out
    names = sorted(p.name for p in (tmp_path / "run").iterdir())
    assert names == ["session.json", "turn0.replay.json"]


def test_synth_is_byte_deterministic_with_fixed_time(tmp_path):
    assert main(synth_args(tmp_path / "a")) == 0
    assert main(synth_args(tmp_path / "b")) == 0
    for name in ("session.json", "turn0.replay.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_without_endpoint_or_mock_exits_2(tmp_path, capsys):
    code = main(["synth", "quadruped", "Spin fast.", "--out", str(tmp_path)])
    assert code == 2
    assert "endpoint" in capsys.readouterr().err


def test_synth_translation_failure_exits_3_with_raw_completion(tmp_path, capsys):
    code = main([
        "synth", "quadruped", "Spin fast.",
        "--mock", GARBAGE, "--out", str(tmp_path / "bad"),
    ])
    assert code == 3
    err = capsys.readouterr().err
    assert "raw completion:" in err
    raw = tmp_path / "bad" / "last_completion.txt"
    assert raw.exists()
    assert "not a motion description" in raw.read_text()


def test_eval_writes_matrix_and_csv(tmp_path, capsys):
    code = main([
        "eval", "--tasks", "spin", "-N", "1", "-M", "2",
        "--mock", "--out", str(tmp_path), "--seed", "1",
    ])
    assert code == 0
    matrix = matrix_from_json((tmp_path / "matrix.json").read_text())
    assert matrix.n == 1 and matrix.m == 2
    assert [t.task_id for t in matrix.tasks] == ["spin"]
    lines = (tmp_path / "pass_rate.csv").read_text().splitlines()
    assert lines[0] == "task,pass@1"
    assert lines[1].startswith("spin,")
    assert lines[2].startswith("aggregate,")
    out = capsys.readouterr().out
    assert "pass@1" in out
    assert "\x1b[" not in out      # not a tty: no ANSI color


def test_eval_unknown_task_exits_4(tmp_path, capsys):
    code = main(["eval", "--tasks", "bogus", "--mock", "--out", str(tmp_path)])
    assert code == 4
    assert "bogus" in capsys.readouterr().err


def test_eval_output_is_deterministic(tmp_path):
    argv = ["eval", "--tasks", "sit_down", "-N", "2", "-M", "2", "--mock", "--seed", "9"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    for name in ("matrix.json", "pass_rate.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.fixture(scope="module")
def synth_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "run"
    assert main(synth_args(out)) == 0
    return out / "turn0.replay.json"


def test_replay_prints_stats_and_reward_recheck(synth_run, capsys):
    capsys.readouterr()
    code = main(["replay", str(synth_run)])
    assert code == 0
    out = capsys.readouterr().out
    assert "frames: 150" in out
    assert "reward recheck: max deviation 0.0e+00" in out


def test_replay_truncated_file_exits_6(synth_run, tmp_path, capsys):
    path = tmp_path / "truncated.replay.json"
    path.write_bytes(synth_run.read_bytes()[:300])
    code = main(["replay", str(path)])
    assert code == 6
    err = capsys.readouterr().err
    assert "corrupt replay" in err and "truncated" in err


def test_replay_tampered_checksum_exits_6(synth_run, tmp_path, capsys):
    doc = json.loads(synth_run.read_text())
    doc["seed"] += 1
    path = tmp_path / "tampered.replay.json"
    path.write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    assert main(["replay", str(path)]) == 6
    assert "checksum" in capsys.readouterr().err


def test_serve_on_occupied_port_exits_5(capsys):
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    blocker.listen(1)
    try:
        code = main([
            "serve", "--port", str(port),
            "--mock", str(FIXTURES / "sessions" / "apple_drawer"),
        ])
    finally:
        blocker.close()
    assert code == 5
    assert "cannot bind" in capsys.readouterr().err


def test_flag_seed_beats_environment(tmp_path, monkeypatch):
    # NL2MPC seed has no env mapping, but endpoint flags beat env settings
    monkeypatch.setenv("NL2MPC_COMPLETIONS_URL", "http://env.example/v1")
    from nl2mpc.config import load_config

    doc = load_config(overrides={"completion": {"endpoint": "http://flag.example/v1"}})
    assert doc["completion"]["endpoint"] == "http://flag.example/v1"
