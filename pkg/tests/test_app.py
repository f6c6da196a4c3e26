"""HTTP and WebSocket API surface."""

from __future__ import annotations

import pathlib
import threading
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from nl2mpc.service.app import create_app
from nl2mpc.service.replay import replay_from_json
from nl2mpc.translate.client import MockCompletionClient

import json

FIXTURES = pathlib.Path(__file__).parent / "fixtures" / "sessions"


def drawer_completions(turns):
    out = []
    for i in turns:
        out.append((FIXTURES / "apple_drawer" / f"turn{i}.descriptor.txt").read_text())
        out.append((FIXTURES / "apple_drawer" / f"turn{i}.txt").read_text())
    return out


@pytest.fixture()
def client():
    app = create_app(
        client_factory=lambda embodiment: MockCompletionClient(
            drawer_completions((1, 2)), cyclic=True
        ),
        clock=lambda: 500.0,
    )
    return TestClient(app)


def make_session(client, **overrides):
    body = {"embodiment": "manipulator", "seed": 7, **overrides}
    response = client.post("/sessions", json=body)
    assert response.status_code == 201
    return response.json()


def test_create_list_and_get(client):
    created = make_session(client)
    assert created["scene"] == "tabletop"   # embodiment default
    assert created["turns"] == 0 and not created["busy"]
    listed = client.get("/sessions").json()
    assert [s["id"] for s in listed] == [created["id"]]
    got = client.get(f"/sessions/{created['id']}").json()
    assert got["turn_history"] == []
    assert len(got["state"]) == 43


def test_mismatched_scene_is_400(client):
    response = client.post("/sessions", json={"embodiment": "quadruped", "scene": "tabletop"})
    assert response.status_code == 400
    assert response.json()["error"] == "invalid"


def test_unknown_session_is_404(client):
    assert client.get("/sessions/missing").status_code == 404
    assert client.post("/sessions/missing/reset").status_code == 404


def test_instruction_executes_and_reports_the_turn(client):
    sid = make_session(client)["id"]
    response = client.post(f"/sessions/{sid}/instructions", json={"text": "Open the drawer."})
    assert response.status_code == 200
    turn = response.json()
    assert turn["index"] == 0
    assert turn["frames"] == 100
    assert turn["plan_duration"] == 2.0
    assert "set_l2_distance_reward" in turn["script_text"]
    spec = client.get(f"/sessions/{sid}/spec").json()
    assert spec["checksum"] == turn["checksum"]
    assert [t["residual_fn"] for t in spec["spec"]["terms"]] == [
        "point_distance",
        "joint_fraction",
    ]


def test_replay_endpoint_serves_a_loadable_document(client):
    sid = make_session(client)["id"]
    client.post(f"/sessions/{sid}/instructions", json={"text": "Open the drawer."})
    response = client.get(f"/sessions/{sid}/replay/0")
    assert response.status_code == 200
    replay = replay_from_json(json.dumps(response.json()))
    assert len(replay.frames) == 100
    assert client.get(f"/sessions/{sid}/replay/5").status_code == 400


def test_review_then_execute_over_http(client):
    sid = make_session(client)["id"]
    staged = client.post(
        f"/sessions/{sid}/translations", json={"text": "Open the drawer."}
    )
    assert staged.status_code == 200
    assert staged.json()["plan_duration"] == 2.0
    summary = client.get(f"/sessions/{sid}").json()
    assert summary["pending"] and summary["turns"] == 0
    done = client.post(f"/sessions/{sid}/executions")
    assert done.status_code == 200
    assert done.json()["index"] == 0
    assert done.json()["checksum"] == staged.json()["checksum"]
    # no pending left
    assert client.post(f"/sessions/{sid}/executions").status_code == 400


def test_reset_over_http(client):
    sid = make_session(client)["id"]
    client.post(f"/sessions/{sid}/instructions", json={"text": "Open the drawer."})
    before = client.get(f"/sessions/{sid}").json()["state"]
    response = client.post(f"/sessions/{sid}/reset")
    assert response.status_code == 200
    after = client.get(f"/sessions/{sid}").json()
    assert after["state"] != before
    assert after["turns"] == 1    # history survives a reset


def test_exhausted_translation_is_422_with_the_raw_completion():
    app = create_app(
        client_factory=lambda embodiment: MockCompletionClient(["gibberish"], cyclic=True)
    )
    client = TestClient(app)
    sid = make_session(client)["id"]
    response = client.post(f"/sessions/{sid}/instructions", json={"text": "wave"})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "translation-failed"
    assert body["last_completion"] == "gibberish"
    assert body["attempts"] >= 1
    # the failed turn left nothing behind
    assert client.get(f"/sessions/{sid}").json()["turns"] == 0


def test_second_instruction_while_busy_is_409():
    gate = threading.Event()
    release = threading.Event()

    class GatedClient:
        def send(self, prompt):
            gate.set()
            release.wait(timeout=10.0)
            from nl2mpc.errors import TranslationError

            raise TranslationError("gated")

    app = create_app(client_factory=lambda embodiment: GatedClient())
    client = TestClient(app)
    sid = make_session(client)["id"]
    results = {}

    def run():
        results["first"] = client.post(
            f"/sessions/{sid}/instructions", json={"text": "open"}
        )

    worker = threading.Thread(target=run)
    worker.start()
    assert gate.wait(timeout=10.0)
    busy = client.post(f"/sessions/{sid}/instructions", json={"text": "again"})
    assert busy.status_code == 409
    assert busy.json()["error"] == "busy"
    assert client.get(f"/sessions/{sid}").json()["busy"]
    release.set()
    worker.join()
    assert results["first"].status_code == 422


def test_websocket_streams_turn_events(client):
    sid = make_session(client)["id"]
    seen = []
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        done = threading.Event()
        outcome = {}

        def run():
            outcome["response"] = client.post(
                f"/sessions/{sid}/instructions", json={"text": "Open the drawer."}
            )
            done.set()

        worker = threading.Thread(target=run)
        worker.start()
        while True:
            event = ws.receive_json()
            seen.append(event)
            if event["type"] == "turn-finished":
                break
        worker.join()
    assert outcome["response"].status_code == 200
    kinds = {e["type"] for e in seen}
    assert {"turn-started", "turn-translated", "frame", "diagnostics", "turn-finished"} <= kinds
    sequence = [e["seq"] for e in seen]
    assert sequence == sorted(sequence)
    frames = [e for e in seen if e["type"] == "frame"]
    assert len(frames[0]["state"]) == 43
    assert frames[0]["spec_checksum"] == outcome["response"].json()["checksum"]


def test_websocket_for_unknown_session_closes(client):
    with pytest.raises(Exception):
        with client.websocket_connect("/sessions/ghost/stream") as ws:
            ws.receive_json()
