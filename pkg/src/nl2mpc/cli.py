"""Operator command line.

    nl2mpc synth <embodiment> "<instruction>"   one-shot translate + execute
    nl2mpc eval  --tasks all -N 10 -M 50        benchmark protocol
    nl2mpc serve --port 8080                    session HTTP/WS daemon
    nl2mpc replay <file>                        inspect + re-validate a replay

Settings resolve with precedence flags > environment > config file >
built-in defaults.  Every command runs fully offline with --mock (synth and
serve take a fixture directory of completion texts, eval uses the packaged
per-task completions); live-endpoint use is opt-in.  Output files are
byte-deterministic for a fixed seed under --mock, except wall-clock
timestamps, which --fixed-time pins.

Exit codes: 0 success, 1 failure, 2 configuration error (e.g. no completion
endpoint without --mock), 3 translation retries exhausted, 4 unknown task,
5 port already in use, 6 corrupt or truncated replay file.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import socket
import sys
import time

from nl2mpc.errors import (
    ChecksumError,
    ConfigError,
    Nl2MpcError,
    TranslationError,
    UnknownTaskError,
    VersionError,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_TRANSLATION = 3
EXIT_UNKNOWN_TASK = 4
EXIT_BIND = 5
EXIT_CORRUPT = 6


def _color_enabled() -> bool:
    return sys.stdout.isatty() and "NO_COLOR" not in os.environ


def _paint(text: str, code: str) -> str:
    if not _color_enabled():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _green(text: str) -> str:
    return _paint(text, "32")


def _red(text: str) -> str:
    return _paint(text, "31")


def _flag_overrides(args) -> dict:
    """Completion settings given as flags, shaped for the config merger."""
    completion = {}
    if getattr(args, "endpoint", None):
        completion["endpoint"] = args.endpoint
    if getattr(args, "model", None):
        completion["model"] = args.model
    if getattr(args, "api_key", None):
        completion["api_key"] = args.api_key
    if getattr(args, "temperature", None) is not None:
        completion["temperature"] = args.temperature
    overrides = {"completion": completion} if completion else {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None):
        overrides["output_dir"] = str(args.out)
    return overrides


def _resolve(args):
    from nl2mpc.config import load_config

    return load_config(path=getattr(args, "config", None), overrides=_flag_overrides(args))


def _live_client(doc):
    from nl2mpc.translate.client import HttpCompletionClient

    completion = doc.get("completion") or {}
    endpoint = completion.get("endpoint")
    if not endpoint:
        raise ConfigError(
            "no completion endpoint configured; pass --mock for offline use, "
            "or set --endpoint / NL2MPC_COMPLETIONS_URL / completion.endpoint"
        )
    return HttpCompletionClient(
        url=endpoint,
        model=completion.get("model") or "gpt-4",
        api_key=completion.get("api_key"),
        temperature=float(completion.get("temperature") or 0.2),
    )


def _mock_client(fixture_dir):
    from nl2mpc.translate.client import MockCompletionClient

    return MockCompletionClient.from_dir(fixture_dir, cyclic=True)


# -------------------------------------------------------------------- synth


def cmd_synth(args) -> int:
    from nl2mpc.config import default_scene_name
    from nl2mpc.rewards.core import spec_checksum
    from nl2mpc.service.session import Session, SessionConfig, save_session

    doc = _resolve(args)
    client = _mock_client(args.mock) if args.mock else _live_client(doc)
    clock = (lambda: args.fixed_time) if args.fixed_time is not None else time.time
    scene = args.scene or default_scene_name(args.embodiment, doc)
    planner = _planner_override(args, doc)
    # a reproducible id keeps the whole output byte-stable for a fixed seed
    import hashlib

    run_key = f"{args.embodiment}|{scene}|{doc['seed']}|{args.instruction}"
    session = Session(
        args.embodiment,
        scene,
        SessionConfig(seed=doc["seed"], planner=planner),
        client=client,
        clock=clock,
        session_id=hashlib.sha256(run_key.encode()).hexdigest()[:12],
    )
    out = pathlib.Path(doc["output_dir"])
    try:
        turn = session.instruct(args.instruction)
    except TranslationError as e:
        out.mkdir(parents=True, exist_ok=True)
        raw = out / "last_completion.txt"
        raw.write_text(e.last_completion)
        print(f"translation failed after {e.attempts} attempts: {e}", file=sys.stderr)
        print(f"raw completion: {raw}", file=sys.stderr)
        return EXIT_TRANSLATION

    save_session(session, out)
    spec = turn.artifacts.spec
    rewards = turn.trajectory.rewards()
    print(f"session {session.id}: {args.embodiment}/{scene}, "
          f"{len(turn.trajectory.frames)} frames @ dt={turn.trajectory.dt}")
    print(f"spec {spec_checksum(spec)[:12]} ({len(spec.terms)} terms), "
          f"plan duration {turn.artifacts.plan_duration}s")
    for term in spec.terms:
        print(f"  {term.id:28s} w={term.weight:<8g} {term.norm.kind:12s} {term.residual_fn}")
    print(f"J = {-rewards.sum():.6g}  (mean reward {rewards.mean():.6g})")
    print(f"wrote {out}/session.json and {len(session.turns)} replay file(s)")
    return EXIT_OK


def _planner_override(args, doc):
    from nl2mpc.config import default_planner_config
    import dataclasses

    planner = default_planner_config(args.embodiment, doc)
    if getattr(args, "backend", None):
        planner = dataclasses.replace(planner, backend=args.backend)
    if getattr(args, "horizon", None):
        planner = dataclasses.replace(planner, horizon=args.horizon)
    return planner


# --------------------------------------------------------------------- eval


class LiveTranslator:
    """Picklable translator for live-endpoint benchmark runs."""

    def __init__(self, completion: dict):
        self.completion = completion

    def __call__(self, task, response_index: int):
        from nl2mpc.bench.runner import Translation
        from nl2mpc.translate.pipeline import translate
        from nl2mpc.translate.script import pretty

        client = _live_client({"completion": self.completion})
        history, scripts, specs, durations = [], [], [], []
        base = None
        for instruction in task.instructions:
            artifacts = translate(instruction, history, client, task.embodiment, base_spec=base)
            history.append(artifacts)
            base = artifacts.spec
            scripts.append(pretty(artifacts.script))
            specs.append(artifacts.spec)
            durations.append(artifacts.plan_duration)
        return Translation(scripts=tuple(scripts), specs=tuple(specs), durations=tuple(durations))


def _select_tasks(spec: str):
    from nl2mpc.bench import TASKS, get_task

    if spec == "all":
        return list(TASKS.values())
    return [get_task(name.strip()) for name in spec.split(",") if name.strip()]


def cmd_eval(args) -> int:
    from nl2mpc.bench import (
        fixture_translator,
        matrix_to_json,
        pass_rate,
        run_benchmark,
        write_pass_rate_csv,
    )

    doc = _resolve(args)
    tasks = _select_tasks(args.tasks)
    if args.mock:
        translator = fixture_translator
    else:
        _live_client(doc)  # fail early with the config message
        translator = LiveTranslator(doc["completion"])
    out = pathlib.Path(doc["output_dir"])
    out.mkdir(parents=True, exist_ok=True)

    def progress(result):
        rate = sum(r.success_rate for r in result.responses) / max(len(result.responses), 1)
        print(f"  {result.task_id:24s} mean success {rate:.2f}")

    print(f"evaluating {len(tasks)} task(s), N={args.responses}, M={args.rollouts}, "
          f"seed={doc['seed']}, jobs={args.jobs}")
    matrix = run_benchmark(
        tasks,
        translator,
        n=args.responses,
        m=args.rollouts,
        seed=doc["seed"],
        jobs=args.jobs,
        progress=progress,
    )
    matrix_path = out / "matrix.json"
    csv_path = out / "pass_rate.csv"
    matrix_path.write_text(matrix_to_json(matrix))
    write_pass_rate_csv(matrix, csv_path)

    report = pass_rate(matrix, k=1)
    print(f"\n{'task':24s} {'pass@1':>8s}")
    for task in tasks:
        value = report.per_task[task.id]
        cell = f"{value:8.2f}"
        print(f"{task.id:24s} {_green(cell) if value > 0 else _red(cell)}")
    print(f"{'aggregate':24s} {report.aggregate:8.2f}")
    print(f"\nwrote {matrix_path} and {csv_path}")
    return EXIT_OK


# -------------------------------------------------------------------- serve


def cmd_serve(args) -> int:
    import uvicorn

    from nl2mpc.service.app import create_app

    doc = _resolve(args)
    if args.mock:
        factory = lambda embodiment: _mock_client(args.mock)  # noqa: E731
    else:
        _live_client(doc)  # fail early with the config message
        factory = lambda embodiment: _live_client(doc)  # noqa: E731

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as e:
        print(f"cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return EXIT_BIND
    finally:
        probe.close()

    app = create_app(client_factory=factory)
    print(f"serving on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ------------------------------------------------------------------- replay


def cmd_replay(args) -> int:
    from nl2mpc.service.replay import read_replay, recheck_rewards

    replay = read_replay(args.path)
    rewards = [f.reward for f in replay.frames]
    checksums = sorted({f.spec_checksum for f in replay.frames})
    duration = len(replay.frames) * replay.dt
    print(f"file: {args.path}")
    print(f"{replay.embodiment}/{replay.scene}, backend {replay.backend}, seed {replay.seed}")
    print(f"frames: {len(replay.frames)}  dt: {replay.dt}  duration: {duration:.2f}s")
    print(f"specs: {len(replay.specs)} ({', '.join(c[:12] for c in checksums)})")
    if rewards:
        print(f"reward: mean {sum(rewards) / len(rewards):.6g}  "
              f"min {min(rewards):.6g}  final {rewards[-1]:.6g}")
    deviation = recheck_rewards(replay)
    print(f"reward recheck: max deviation {deviation:.1e}")
    return EXIT_OK


# -------------------------------------------------------------------- main


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a YAML config file")
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--endpoint", help="completions endpoint URL")
    parser.add_argument("--model", help="completions model name")
    parser.add_argument("--api-key", help="completions bearer token")
    parser.add_argument("--temperature", type=float, help="completions sampling temperature")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nl2mpc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="translate one instruction and execute it")
    synth.add_argument("embodiment", choices=("quadruped", "manipulator"))
    synth.add_argument("instruction")
    synth.add_argument("--mock", metavar="DIR",
                       help="fixture directory of completion .txt files (offline)")
    synth.add_argument("--scene", help="scene name (embodiment default otherwise)")
    synth.add_argument("--backend", choices=("ps", "ilqg"), help="planner backend override")
    synth.add_argument("--horizon", type=int, help="planner horizon override")
    synth.add_argument("--fixed-time", type=float, default=None,
                       help="pin timestamps to this epoch value for reproducible output")
    _add_common(synth)
    synth.set_defaults(fn=cmd_synth)

    ev = sub.add_parser("eval", help="run the N-responses x M-rollouts benchmark")
    ev.add_argument("--tasks", default="all",
                    help='comma-separated task ids, or "all" (default)')
    ev.add_argument("-N", "--responses", type=int, default=10)
    ev.add_argument("-M", "--rollouts", type=int, default=50)
    ev.add_argument("--mock", action="store_true",
                    help="use the packaged per-task completions (offline)")
    ev.add_argument("--jobs", type=int, default=1, help="parallel task workers")
    _add_common(ev)
    ev.set_defaults(fn=cmd_eval)

    serve = sub.add_parser("serve", help="run the session HTTP/WS service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--mock", metavar="DIR",
                       help="fixture directory; every session replays it (offline)")
    _add_common(serve)
    serve.set_defaults(fn=cmd_serve)

    replay = sub.add_parser("replay", help="print replay statistics and re-validate rewards")
    replay.add_argument("path")
    _add_common(replay)
    replay.set_defaults(fn=cmd_replay)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ChecksumError, VersionError) as e:
        print(f"corrupt replay: {e}", file=sys.stderr)
        return EXIT_CORRUPT
    except UnknownTaskError as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNKNOWN_TASK
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_CONFIG
    except TranslationError as e:
        print(f"translation failed: {e}", file=sys.stderr)
        return EXIT_TRANSLATION
    except Nl2MpcError as e:
        print(str(e), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
