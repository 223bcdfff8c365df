"""JSON-over-HTTP tutor service.

Routes:
    POST /sessions                         {student_id, condition?}
    GET  /sessions/{sid}
    POST /sessions/{sid}/steps             {premises: [node ids], rule, claimed?}
    POST /sessions/{sid}/hint
    POST /sessions/{sid}/nodes/{nid}/delete
    POST /sessions/{sid}/restart
    POST /sessions/{sid}/skip
    GET  /problems

Formula fields use the ASCII grammar everywhere.  Requests for the same
session are serialized by a per-session lock; kernel rejections surface
as 422 with the verbatim tutor error text; unsolicited hints ride along
inside step responses, never out of band.
"""

from __future__ import annotations

import json
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .errors import (
    DuplicateSession,
    HintAlreadyPresent,
    NoHintAvailable,
    PhaseForbidsHints,
    PhaseForbidsSkip,
    ProtectedNode,
    TutorError,
    UnknownNode,
    UnknownSession,
)
from .formula import render
from .hints import HintProvider
from .problems import Curriculum
from .proof import color_nodes
from .session import CONDITIONS, TutorSession

_STATUS = {
    UnknownSession: 404,
    UnknownNode: 404,
    NoHintAvailable: 404,
    DuplicateSession: 409,
    HintAlreadyPresent: 409,
    PhaseForbidsHints: 403,
    PhaseForbidsSkip: 403,
    ProtectedNode: 403,
}


def _status_for(exc: TutorError) -> int:
    for cls, code in _STATUS.items():
        if isinstance(exc, cls):
            return code
    return 400


class TutorService:
    """Session registry plus the domain operations the routes expose."""

    def __init__(self, curriculum: Curriculum, networks=None, stats=None, log_path=None):
        self.curriculum = curriculum
        self.provider = HintProvider(networks or {})
        self.stats = stats or {}
        self.log_path = log_path
        self.sessions: dict[str, TutorSession] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.by_student: dict[str, str] = {}
        self._registry_lock = threading.Lock()
        self._assign_flip = 0

    # -- operations ---------------------------------------------------------

    def create_session(self, student_id: str, condition: str | None = None) -> dict:
        with self._registry_lock:
            if student_id in self.by_student:
                raise DuplicateSession(f"student {student_id!r} already has a session")
            if condition is None:
                condition = CONDITIONS[self._assign_flip % len(CONDITIONS)]
                self._assign_flip += 1
            elif condition not in CONDITIONS:
                raise TutorError(f"condition must be one of {CONDITIONS}")
            sid = uuid.uuid4().hex[:12]
            session = TutorSession(
                sid=sid,
                student_id=student_id,
                condition=condition,
                curriculum=self.curriculum,
                log_path=self.log_path,
                hint_provider=self.provider,
            )
            self.sessions[sid] = session
            self.locks[sid] = threading.Lock()
            self.by_student[student_id] = sid
        return self.view(session)

    def _session(self, sid: str) -> tuple[TutorSession, threading.Lock]:
        session = self.sessions.get(sid)
        if session is None:
            raise UnknownSession(f"no session {sid!r}")
        return session, self.locks[sid]

    def get_view(self, sid: str) -> dict:
        session, _ = self._session(sid)
        return self.view(session)

    def step(self, sid: str, premises, rule: str, claimed: str | None) -> dict:
        session, lock = self._session(sid)
        with lock:
            outcome = session.step(premises, rule, claimed)
            body = {
                "result": outcome.result.kind,
                "completed": outcome.result.completed,
                "advanced": outcome.advanced,
                "finished": outcome.finished,
                "state": self.view(session),
            }
            if outcome.result.kind == "error":
                body["error"] = outcome.result.message
            if outcome.result.options:
                body["options"] = [render(f) for f in outcome.result.options]
            if outcome.result.node is not None:
                body["node"] = _node_view(outcome.result.node)
            if outcome.hint is not None:
                body["hint"] = outcome.hint.payload()
            return body

    def request_hint(self, sid: str) -> dict:
        session, lock = self._session(sid)
        with lock:
            hint = session.request_hint()
            return {"hint": hint.payload(), "state": self.view(session)}

    def delete_node(self, sid: str, node_id: int) -> dict:
        session, lock = self._session(sid)
        with lock:
            removed = session.delete(node_id)
            return {"removed": removed, "state": self.view(session)}

    def restart(self, sid: str) -> dict:
        session, lock = self._session(sid)
        with lock:
            session.restart()
            return {"state": self.view(session)}

    def skip(self, sid: str) -> dict:
        session, lock = self._session(sid)
        with lock:
            finished = session.skip()
            return {"finished": finished, "state": self.view(session)}

    def problems(self) -> list[dict]:
        return [p.to_json() for p in self.curriculum.sequence()]

    # -- views ---------------------------------------------------------------

    def view(self, session: TutorSession) -> dict:
        body = {
            "sid": session.sid,
            "student": session.student_id,
            "condition": session.condition,
            "finished": session.finished,
        }
        if session.finished:
            return body
        problem = session.problem
        state = session.state
        colors = {}
        stats = self.stats.get(problem.id)
        if stats is not None and problem.phase == "training":
            colors = color_nodes(state, stats)
        rules = session.rules_for_phase
        body.update(
            {
                "phase": problem.phase,
                "problem": problem.to_json(),
                "focus": problem.focus,
                "worked": problem.worked,
                "hints_enabled": rules.hints_enabled,
                "skip_enabled": rules.skip_enabled,
                "nodes": [
                    dict(_node_view(n), color=colors.get(n.id))
                    for n in state.nodes.values()
                ],
                "edges": state.edges(),
                "complete": state.is_complete(),
                "step_count": state.step_count,
                "error_count": state.error_count,
                "hints_remaining": max(
                    0, session.scheduler.cap - session.scheduler.unsolicited_given
                ),
            }
        )
        return body


def _node_view(node) -> dict:
    return {
        "id": node.id,
        "statement": render(node.statement),
        "kind": node.kind,
        "justified": node.justified,
        "label": node.label,
        "rule": node.justification.rule_id if node.justification else None,
        "parents": list(node.justification.parent_ids) if node.justification else [],
    }


class _Handler(BaseHTTPRequestHandler):
    service: TutorService  # set by make_server

    def log_message(self, *args):  # quiet
        pass

    def _send(self, code: int, body: dict | list) -> None:
        data = json.dumps(body).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(data)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if not length:
            return {}
        return json.loads(self.rfile.read(length).decode() or "{}")

    def do_OPTIONS(self):
        self._send(204, {})

    def do_GET(self):
        try:
            parts = [p for p in self.path.split("/") if p]
            if parts == ["problems"]:
                return self._send(200, self.service.problems())
            if len(parts) == 2 and parts[0] == "sessions":
                return self._send(200, self.service.get_view(parts[1]))
            return self._send(404, {"error": "no such route"})
        except TutorError as exc:
            return self._send(_status_for(exc), {"error": str(exc)})

    def do_POST(self):
        try:
            parts = [p for p in self.path.split("/") if p]
            body = self._body()
            if parts == ["sessions"]:
                view = self.service.create_session(
                    body["student_id"], body.get("condition")
                )
                return self._send(201, view)
            if len(parts) >= 3 and parts[0] == "sessions":
                sid, action = parts[1], parts[2]
                if action == "steps":
                    result = self.service.step(
                        sid,
                        body.get("premises", []),
                        body.get("rule", ""),
                        body.get("claimed"),
                    )
                    code = 422 if result["result"] == "error" else 200
                    if result["result"] == "error":
                        result["error"] = result.get("error", "")
                    return self._send(code, result)
                if action == "hint":
                    return self._send(200, self.service.request_hint(sid))
                if action == "restart":
                    return self._send(200, self.service.restart(sid))
                if action == "skip":
                    return self._send(200, self.service.skip(sid))
                if action == "nodes" and len(parts) == 5 and parts[4] == "delete":
                    return self._send(
                        200, self.service.delete_node(sid, int(parts[3]))
                    )
            return self._send(404, {"error": "no such route"})
        except TutorError as exc:
            return self._send(_status_for(exc), {"error": str(exc)})
        except (KeyError, ValueError) as exc:
            return self._send(400, {"error": f"bad request: {exc}"})


def make_server(service: TutorService, port: int = 0) -> ThreadingHTTPServer:
    """A ready ThreadingHTTPServer; port 0 picks an ephemeral port."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve_forever(service: TutorService, port: int) -> None:
    server = make_server(service, port)
    host, actual_port = server.server_address
    print(f"tutor service listening on http://{host}:{actual_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
