"""HTTP service over the run store, consumed by the web console.

The service is a thin view over run directories: reads are served straight
from files, run execution happens on background threads with one writer per
run, and progress streams out as server-sent events tailing events.jsonl.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel, Field

from ..genloop import TransportError, make_transport
from .pipeline import RunConfig, run_experiment, submit_feedback
from .records import Feedback
from .store import RunStore, UnknownRun

TERMINAL = {"done", "failed"}
SSE_POLL_SECONDS = 0.25
SSE_HEARTBEAT_EVERY = 40  # polls between keepalive comments


class CreateRunBody(BaseModel):
    env_id: str
    instruction: str
    mode: str = "zero_shot"
    algo: str = "sac"
    profile: str = "manip"
    seed: int = 0
    budget_steps: int = Field(default=60_000, ge=0)
    transport: str = "replay"
    cassette: str | None = None
    interactive: bool = True
    success_stop: float | None = 0.9
    config_overrides: dict = Field(default_factory=dict)


class FeedbackBody(BaseModel):
    description: str = ""
    improvement: str


def build_app(store: RunStore, console_dist: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="reward-run service")
    store.recover_all()  # quarantine leftovers from interrupted executions
    running: set[str] = set()
    running_lock = threading.Lock()

    def _load(run_id: str):
        try:
            return store.load(run_id)
        except UnknownRun:
            raise HTTPException(404, f"unknown run '{run_id}'") from None

    def _mark_running(run_id: str) -> bool:
        with running_lock:
            if run_id in running:
                return False
            running.add(run_id)
            return True

    def _unmark(run_id: str) -> None:
        with running_lock:
            running.discard(run_id)

    @app.get("/runs")
    def list_runs():
        out = []
        for run_id in store.list_runs():
            rec = store.load(run_id)
            out.append({
                "run_id": rec.run_id,
                "env_id": rec.env_id,
                "instruction": rec.instruction,
                "status": rec.status,
                "mode": rec.mode,
                "iterations": len(rec.iterations),
            })
        return out

    @app.post("/runs", status_code=202)
    def create_run(body: CreateRunBody):
        try:
            transport = make_transport(body.transport, cassette=body.cassette)
        except TransportError as exc:
            raise HTTPException(400, str(exc)) from None
        config = RunConfig(
            env_id=body.env_id,
            instruction=body.instruction,
            mode=body.mode,
            algo=body.algo,
            profile=body.profile,
            seed=body.seed,
            budget_steps=body.budget_steps,
            transport_kind=body.transport,
            cassette=body.cassette or "",
            interactive=body.interactive,
            success_stop=body.success_stop,
            config_overrides=body.config_overrides,
        )
        try:
            from .. import envlab

            envlab.env_schema(config.env_id)
        except KeyError as exc:
            raise HTTPException(400, str(exc)) from None
        run_id = store.new_run_id(config.env_id)
        config.run_id = run_id
        _mark_running(run_id)

        def worker():
            try:
                run_experiment(store, config, transport)
            except Exception:
                pass  # recorded in the run's failed state
            finally:
                _unmark(run_id)

        threading.Thread(target=worker, name=f"run-{run_id}", daemon=True).start()
        return {"run_id": run_id, "status": "generating"}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return _load(run_id).to_dict()

    @app.get("/runs/{run_id}/curve", response_class=PlainTextResponse)
    def get_curve(run_id: str, iteration: int = Query(default=-1)):
        rec = _load(run_id)
        if not rec.iterations:
            raise HTTPException(404, "run has no completed iterations")
        idx = rec.iterations[-1].index if iteration < 0 else iteration
        path = store.iter_dir(run_id, idx) / "curve.csv"
        if not path.exists():
            raise HTTPException(404, f"no curve for iteration {idx}")
        return PlainTextResponse(path.read_text(encoding="utf-8"), media_type="text/csv")

    @app.get("/runs/{run_id}/rollouts/{ep}", response_class=PlainTextResponse)
    def get_rollout(run_id: str, ep: int, iteration: int = Query(default=-1)):
        rec = _load(run_id)
        if not rec.iterations:
            raise HTTPException(404, "run has no completed iterations")
        idx = rec.iterations[-1].index if iteration < 0 else iteration
        path = store.iter_dir(run_id, idx) / "rollouts" / f"ep{ep:02d}.jsonl"
        if not path.exists():
            raise HTTPException(404, f"no rollout ep{ep:02d} for iteration {idx}")
        return PlainTextResponse(path.read_text(encoding="utf-8"),
                                 media_type="application/jsonl")

    @app.post("/runs/{run_id}/feedback", status_code=202)
    def post_feedback(run_id: str, body: FeedbackBody):
        rec = _load(run_id)
        if not body.improvement.strip():
            raise HTTPException(400, "improvement text must be nonempty")
        if rec.status != "awaiting_feedback":
            raise HTTPException(409, f"run is '{rec.status}', feedback needs 'awaiting_feedback'")
        if not _mark_running(run_id):
            raise HTTPException(409, "run is busy")
        try:
            transport = make_transport(rec.transport_kind, cassette=rec.cassette or None)
        except TransportError as exc:
            _unmark(run_id)
            raise HTTPException(400, str(exc)) from None
        fb = Feedback(description=body.description, improvement=body.improvement)

        def worker():
            try:
                submit_feedback(store, run_id, fb, transport)
            except Exception:
                pass
            finally:
                _unmark(run_id)

        threading.Thread(target=worker, name=f"feedback-{run_id}", daemon=True).start()
        return {"run_id": run_id, "status": "generating", "next_iteration": len(rec.iterations)}

    @app.get("/runs/{run_id}/events")
    async def get_events(run_id: str, request: Request, once: bool = False):
        _load(run_id)

        def stream():
            last = -1
            idle = 0
            while True:
                events = store.read_events(run_id, after=last)
                for ev in events:
                    last = ev.get("seq", last + 1)
                    yield f"data: {json.dumps(ev)}\n\n"
                if once:
                    return
                rec = store.load(run_id)
                with running_lock:
                    busy = run_id in running
                if rec.status in TERMINAL and not events and not busy:
                    yield "event: end\ndata: {}\n\n"
                    return
                idle += 1
                if idle % SSE_HEARTBEAT_EVERY == 0:
                    yield ": keepalive\n\n"
                time.sleep(SSE_POLL_SECONDS)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if console_dist is not None and Path(console_dist).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(console_dist), html=True), name="console")
    else:
        @app.get("/")
        def index():
            return {"service": "reward-run", "console": "not built",
                    "api": ["/runs", "/runs/{id}", "/runs/{id}/curve",
                            "/runs/{id}/rollouts/{ep}", "/runs/{id}/feedback",
                            "/runs/{id}/events"]}

    return app
