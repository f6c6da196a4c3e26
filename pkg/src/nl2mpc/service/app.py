"""HTTP and WebSocket front end for synthesis sessions.

The app exposes everything a client needs to drive a session remotely:
create sessions, send instructions (either execute immediately or stage for
review and execute after confirmation), inspect the live reward spec and
turn history, download per-turn replay documents, and stream frame /
diagnostic events over a WebSocket while a turn runs.

Error mapping: a turn already in flight answers 409, translation giving up
after its retries answers 422 (with the raw last completion for the audit
trail), bad arguments answer 400, unknown ids answer 404.  Instruction
handlers are synchronous and run on the threadpool, so the event loop stays
responsive while the planner works.
"""

from __future__ import annotations

import asyncio
import json
import time

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from nl2mpc.errors import (
    BusyError,
    ScriptError,
    TranslationError,
    ValidationError,
)
from nl2mpc.rewards.core import spec_checksum, spec_to_canonical_json
from nl2mpc.service.session import Session, SessionConfig, Turn, create_session
from nl2mpc.translate.pipeline import TurnArtifacts


class CreateSessionRequest(BaseModel):
    embodiment: str
    scene: str | None = None
    seed: int = 0


class InstructionRequest(BaseModel):
    text: str


def _spec_payload(spec) -> dict:
    return {"checksum": spec_checksum(spec), "spec": json.loads(spec_to_canonical_json(spec))}


def _artifacts_payload(a: TurnArtifacts) -> dict:
    return {
        "instruction": a.instruction,
        "descriptor_text": a.descriptor_text,
        "script_text": a.script_text,
        "plan_duration": a.plan_duration,
        "descriptor_retries": a.descriptor_retries,
        "coder_retries": a.coder_retries,
        **_spec_payload(a.spec),
    }


def _turn_payload(t: Turn) -> dict:
    return {
        "index": t.index,
        "seed": t.seed,
        "frames": len(t.trajectory.frames),
        "dt": t.trajectory.dt,
        "backend": t.trajectory.backend,
        "final_state": t.trajectory.final_state.tolist(),
        "started_at": t.started_at,
        "finished_at": t.finished_at,
        **_artifacts_payload(t.artifacts),
    }


def _session_summary(s: Session) -> dict:
    return {
        "id": s.id,
        "embodiment": s.embodiment,
        "scene": s.scene,
        "turns": len(s.turns),
        "busy": s.busy,
        "pending": s.pending is not None,
        "spec_checksum": spec_checksum(s.spec),
    }


def create_app(client_factory=None, clock=time.time) -> FastAPI:
    """`client_factory(embodiment) -> CompletionClient` supplies the
    translator backend for each new session."""
    app = FastAPI(title="nl2mpc session service")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def _get(session_id: str) -> Session:
        try:
            return sessions[session_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}") from None

    @app.exception_handler(BusyError)
    async def _busy(request, exc):
        return JSONResponse(status_code=409, content={"error": "busy", "detail": str(exc)})

    @app.exception_handler(TranslationError)
    async def _translation(request, exc):
        return JSONResponse(
            status_code=422,
            content={
                "error": "translation-failed",
                "detail": str(exc),
                "attempts": exc.attempts,
                "last_completion": exc.last_completion,
            },
        )

    @app.exception_handler(ScriptError)
    async def _script(request, exc):
        return JSONResponse(status_code=422, content={"error": "bad-script", "detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _validation(request, exc):
        return JSONResponse(status_code=400, content={"error": "invalid", "detail": str(exc)})

    @app.get("/")
    def index():
        return {"service": "nl2mpc", "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def make_session(req: CreateSessionRequest):
        client = client_factory(req.embodiment) if client_factory else None
        session = create_session(
            req.embodiment,
            req.scene,
            config=SessionConfig(seed=req.seed),
            client=client,
            clock=clock,
        )
        sessions[session.id] = session
        return _session_summary(session)

    @app.get("/sessions")
    def list_sessions():
        return [_session_summary(s) for s in sessions.values()]

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        s = _get(session_id)
        return {
            **_session_summary(s),
            "state": s.state.tolist(),
            "turn_history": [_turn_payload(t) for t in s.turns],
        }

    @app.post("/sessions/{session_id}/instructions")
    def instruct(session_id: str, req: InstructionRequest):
        s = _get(session_id)
        turn = s.instruct(req.text)
        return _turn_payload(turn)

    @app.post("/sessions/{session_id}/translations")
    def translate_only(session_id: str, req: InstructionRequest):
        s = _get(session_id)
        return _artifacts_payload(s.translate_only(req.text))

    @app.post("/sessions/{session_id}/executions")
    def execute_pending(session_id: str):
        s = _get(session_id)
        return _turn_payload(s.execute_pending())

    @app.post("/sessions/{session_id}/reset")
    def reset(session_id: str):
        s = _get(session_id)
        s.reset()
        return _session_summary(s)

    @app.get("/sessions/{session_id}/spec")
    def get_spec(session_id: str):
        return _spec_payload(_get(session_id).spec)

    @app.get("/sessions/{session_id}/replay/{turn_index}")
    def get_replay(session_id: str, turn_index: int):
        from nl2mpc.service.replay import replay_document

        s = _get(session_id)
        return replay_document(s.turn_replay(turn_index))

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        session = sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        sub = session.bus.subscribe()
        closed = asyncio.Event()

        async def watch_disconnect():
            try:
                while True:
                    message = await websocket.receive()
                    if message["type"] == "websocket.disconnect":
                        break
            except Exception:
                pass
            closed.set()

        watcher = asyncio.create_task(watch_disconnect())
        try:
            while not closed.is_set():
                event = await run_in_threadpool(sub.get, 0.1)
                if event is not None:
                    await websocket.send_json(event)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            closed.set()
            watcher.cancel()
            sub.close()

    return app
