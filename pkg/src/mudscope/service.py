"""HTTP review service over the connectivity graph engine.

Mutations are serialized through one lock (single-writer contract); reads
serve immutable snapshots.  Profiles and the promise ledger persist under a
state directory so fulfillments survive restarts.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from mudscope import errors
from mudscope.export import (
    apply_promise_ledger,
    graph_to_dict,
    promise_ledger_to_json,
    stack_to_dict,
)
from mudscope.parser import parse_mud_file
from mudscope.topology import ConnectivityGraph


class ServiceState:
    def __init__(self, state_dir: Path | None, strict: bool = False,
                 one_sided: bool = False) -> None:
        self.lock = threading.Lock()
        self.state_dir = state_dir
        self.graph = ConnectivityGraph(strict=strict, one_sided=one_sided)
        self.documents: dict[str, str] = {}
        self.version = 1
        if state_dir is not None:
            state_dir.mkdir(parents=True, exist_ok=True)
            self._restore()

    def _restore(self) -> None:
        profiles_file = self.state_dir / "profiles.json"
        if profiles_file.is_file():
            stored = json.loads(profiles_file.read_text(encoding="utf-8"))
            for profile_id, document in stored.get("profiles", {}).items():
                profile, report = parse_mud_file(document, profile_id=profile_id)
                if profile is not None:
                    self.graph.add_profile(profile)
                    self.documents[profile_id] = document
        ledger_file = self.state_dir / "promises.json"
        if ledger_file.is_file():
            apply_promise_ledger(self.graph, ledger_file.read_text(encoding="utf-8"))

    def persist(self) -> None:
        if self.state_dir is None:
            return
        profiles_file = self.state_dir / "profiles.json"
        profiles_file.write_text(
            json.dumps({"profiles": self.documents}, sort_keys=True),
            encoding="utf-8")
        ledger_file = self.state_dir / "promises.json"
        ledger_file.write_text(promise_ledger_to_json(self.graph), encoding="utf-8")


def _error(status: int, code: str, message: str, path: str | None = None) -> JSONResponse:
    body = {"code": code, "message": message}
    if path:
        body["path"] = path
    return JSONResponse(body, status_code=status)


def create_app(state_dir: Path | None = None, strict: bool = False,
               one_sided: bool = False) -> FastAPI:
    state = ServiceState(state_dir, strict=strict, one_sided=one_sided)
    app = FastAPI(title="mudscope", version="1")
    app.state.engine = state

    @app.post("/api/mudfiles")
    async def add_mudfile(request: Request):
        document = (await request.body()).decode("utf-8", errors="replace")
        profile, report = parse_mud_file(document)
        if profile is None:
            return JSONResponse({"code": "ValidationFailed",
                                 "message": "MUD file has errors",
                                 "report": report.to_dict()}, status_code=422)
        with state.lock:
            try:
                state.graph.add_profile(profile)
            except errors.DuplicateProfile:
                return _error(409, "DuplicateProfile",
                              f"profile {profile.id} is already loaded")
            state.documents[profile.id] = document
            state.version += 1
            state.persist()
            return {"id": profile.id, "report": report.to_dict(),
                    "graphVersion": state.version}

    @app.delete("/api/mudfiles/{profile_id:path}")
    def delete_mudfile(profile_id: str):
        with state.lock:
            try:
                state.graph.remove_profile(profile_id)
            except errors.UnknownDevice:
                return _error(404, "UnknownDevice", f"no profile {profile_id}")
            state.documents.pop(profile_id, None)
            state.version += 1
            state.persist()
            return {"graphVersion": state.version}

    @app.get("/api/graph")
    def get_graph(request: Request, response: Response):
        with state.lock:
            etag = f'"{state.version}"'
            if request.headers.get("if-none-match") == etag:
                return Response(status_code=304)
            body = graph_to_dict(state.graph)
            body["graphVersion"] = state.version
            response.headers["ETag"] = etag
            return body

    @app.get("/api/promises")
    def get_promises():
        with state.lock:
            body = graph_to_dict(state.graph)
            return {"promises": body["promises"], "graphVersion": state.version}

    @app.put("/api/promises/{promise_id}")
    async def fulfill(promise_id: str, request: Request):
        try:
            payload = json.loads((await request.body()).decode("utf-8"))
        except json.JSONDecodeError:
            return _error(422, "MalformedJson", "body must be JSON")
        hosts = payload.get("hosts", [])
        with state.lock:
            try:
                state.graph.fulfill_promise(promise_id, hosts)
            except errors.UnknownPromise:
                return _error(404, "UnknownPromise", f"no promise {promise_id}")
            except errors.AlreadyFulfilled:
                return _error(409, "AlreadyFulfilled",
                              f"promise {promise_id} was fulfilled earlier")
            except errors.EmptyHostList:
                return _error(422, "EmptyHostList", "hosts must be non-empty")
            state.version += 1
            state.persist()
            return {"graphVersion": state.version}

    @app.get("/api/flows")
    def get_flows(src: str, dst: str):
        with state.lock:
            try:
                stacks = state.graph.query_flow(src, dst)
            except errors.UnknownNode as exc:
                return _error(404, "UnknownNode", f"no node {exc}")
            return {"src": src, "dst": dst,
                    "stacks": [stack_to_dict(s) for s in stacks],
                    "graphVersion": state.version}

    @app.get("/api/report")
    def get_report():
        with state.lock:
            items = state.graph.redundancy_report()
            return {"items": [{"deviceId": i.device_id, "aceName": i.ace_name,
                               "reason": i.reason} for i in items],
                    "graphVersion": state.version}

    ui_dir = os.environ.get("MUDSCOPE_UI_DIR")
    candidates = [Path(ui_dir)] if ui_dir else [Path.cwd() / "frontend" / "dist"]
    for candidate in candidates:
        if candidate.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=candidate, html=True), name="ui")
            break

    return app
