"""HTTP + WebSocket service exposing sessions to the dashboard UI.

Resource endpoints serve read-only snapshots of one session's state; a single
command endpoint applies mutations; a WebSocket push channel broadcasts the
names of invalidated resources so clients know what to refetch. Within a
session, commands are serialized by a per-session lock; reads see consistent
snapshots.
"""

import asyncio
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import ToolError, UnknownIdError
from .project import load_bundle
from .shell import Session, load_project, run_report


@dataclass
class _SessionHandle:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    watchers: list[asyncio.Queue] = field(default_factory=list)


class SessionStore:
    def __init__(self):
        self._handles: dict[str, _SessionHandle] = {}

    def add(self, session: Session) -> _SessionHandle:
        handle = _SessionHandle(session)
        self._handles[session.session_id] = handle
        return handle

    def get(self, session_id: str) -> _SessionHandle:
        handle = self._handles.get(session_id)
        if handle is None:
            raise UnknownIdError(f"no session {session_id!r}")
        return handle

    def ids(self) -> list[str]:
        return list(self._handles)


class LoadRequest(BaseModel):
    bundle_path: str


class CommandRequest(BaseModel):
    command: str
    pane: str | None = None
    id: str | None = None
    ids: list[str] | None = None
    element_id: str | None = None
    action: str | None = None
    key: str | None = None
    value: str | None = None
    pattern: str | None = None
    fields: list[str] | None = None
    bucket_only: bool | None = None

    def as_command(self) -> dict:
        payload = {"command": self.command}
        for name in ("pane", "id", "ids", "element_id", "action", "key",
                     "value", "pattern", "fields", "bucket_only"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value
        return payload


def create_app(store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="threatlens", version="0.1.0")
    app.state.store = store or SessionStore()
    # The dashboard is served separately from the API (any static server);
    # this is a single-analyst local tool, so allow any origin.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def handle(session_id: str) -> _SessionHandle:
        try:
            return app.state.store.get(session_id)
        except UnknownIdError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/projects")
    def load(request: LoadRequest):
        try:
            bundle = load_bundle(request.bundle_path)
            session = load_project(bundle, request.bundle_path)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except ToolError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        app.state.store.add(session)
        return {
            "session_id": session.session_id,
            "diagnostics": [
                {"severity": d.severity, "message": d.message, "subject": d.subject}
                for d in session.diagnostics
            ],
        }

    @app.get("/sessions")
    def sessions():
        return {"sessions": app.state.store.ids()}

    @app.get("/sessions/{session_id}/topology")
    def topology(session_id: str):
        return handle(session_id).session.topology_snapshot()

    @app.get("/sessions/{session_id}/spec")
    def spec(session_id: str):
        return handle(session_id).session.spec_snapshot()

    @app.get("/sessions/{session_id}/av-graph")
    def av_graph(session_id: str):
        return handle(session_id).session.av_snapshot()

    @app.get("/sessions/{session_id}/surface")
    def surface(session_id: str):
        return handle(session_id).session.surface_snapshot()

    @app.get("/sessions/{session_id}/chains")
    def chains(session_id: str, target: str, max_depth: int = 10, max_chains: int = 1000):
        try:
            return handle(session_id).session.chains_snapshot(target, max_depth, max_chains)
        except UnknownIdError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/sessions/{session_id}/bucket")
    def bucket(session_id: str):
        return handle(session_id).session.bucket_snapshot()

    @app.get("/sessions/{session_id}/selection")
    def selection(session_id: str):
        return handle(session_id).session.selection_snapshot()

    @app.get("/sessions/{session_id}/av-filter")
    def av_filter(session_id: str):
        return handle(session_id).session.av_filter_snapshot()

    @app.get("/sessions/{session_id}/projection")
    def projection(session_id: str):
        return handle(session_id).session.projection_snapshot()

    @app.get("/sessions/{session_id}/positions/{pane}")
    def positions(session_id: str, pane: str):
        try:
            return handle(session_id).session.positions_snapshot(pane)
        except UnknownIdError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/sessions/{session_id}/entries/{native_id}")
    def entry(session_id: str, native_id: str):
        try:
            return handle(session_id).session.entry_snapshot(native_id)
        except UnknownIdError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/sessions/{session_id}/report")
    def report(session_id: str, format: str = "json"):
        try:
            text = run_report(handle(session_id).session, format)
        except ToolError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"format": format, "document": text}

    @app.post("/sessions/{session_id}/commands")
    async def command(session_id: str, request: CommandRequest):
        h = handle(session_id)
        try:
            with h.lock:
                invalidated = h.session.apply_command(request.as_command())
        except UnknownIdError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except (ToolError, ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        event = {"session_id": session_id, "invalidated": invalidated}
        for queue in list(h.watchers):
            await queue.put(event)
        return {"ok": True, "invalidated": invalidated}

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        try:
            h = app.state.store.get(session_id)
        except UnknownIdError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        h.watchers.append(queue)
        try:
            while True:
                event = await queue.get()
                await websocket.send_json(event)
        except WebSocketDisconnect:
            pass
        finally:
            if queue in h.watchers:
                h.watchers.remove(queue)

    return app
