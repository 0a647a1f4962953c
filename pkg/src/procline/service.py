"""HTTP service the web client consumes.

Plain stdlib server; request and response bodies use the same JSON shapes as
the persistence layer.  Sessions live in memory, are serialized per session,
and are snapshotted to disk after every mutation when a snapshot path is
configured.  The listen address comes from the single environment variable
PROCLINE_LISTEN (host:port).
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import interfaces, serialize
from .line import build_process_line, cut_at_abstraction, diff_to_core
from .model import (
    ApprovalRequiredError,
    NotFoundError,
    ParseError,
    PhaseError,
    ProcessError,
)
from .reflection import compute_delta, discover_process, parse_event_log, refine_process, suggest_additions
from .selection import select_top_k

LISTEN_ENV = "PROCLINE_LISTEN"
DEFAULT_LISTEN = "127.0.0.1:8640"

_STATUS_BY_CODE = {
    "not-found": 404,
    "approval-required": 409,
    "phase-error": 409,
    "parse-error": 400,
    "invalid-query": 400,
    "invalid-approval": 400,
    "mandatory-kind": 400,
    "kind-disabled": 400,
    "migration-required": 400,
}


class WorkbenchState:
    """Shared state behind the endpoints. Per-session locks serialize actions."""

    def __init__(self, base, snapshot_path=None):
        self.base = base
        self.line = build_process_line(base.variants)
        self.snapshot_path = snapshot_path
        self.selected_variant_id = None
        self.prescriptive = None
        self.event_log = None
        self.performed = None
        self.sessions: dict = {}
        self._session_locks: dict = {}
        self._registry_lock = threading.Lock()
        # current log/discovery/prescriptive are shared across requests
        self.artifacts_lock = threading.Lock()
        self._snapshot_lock = threading.Lock()

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def snapshot(self) -> None:
        if self.snapshot_path is None:
            return
        with self._snapshot_lock:
            data = {
                "sessions": {
                    sid: interfaces.session_to_dict(session) for sid, session in self.sessions.items()
                }
            }
            Path(self.snapshot_path).write_text(serialize.dumps(data), encoding="utf-8")


def _delta_payload(delta) -> dict:
    payload = serialize.process_delta_to_dict(delta)
    payload["suggestions"] = sorted(str(k) for k in suggest_additions(delta))
    return payload


class WorkbenchHandler(BaseHTTPRequestHandler):
    state: WorkbenchState

    # -- plumbing ------------------------------------------------------------

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send(self, status: int, data) -> None:
        body = serialize.dumps(data).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _fail(self, exc: ProcessError) -> None:
        status = _STATUS_BY_CODE.get(exc.code, 400)
        self._send(status, {"error": {"code": exc.code, "message": str(exc)}})

    def _body(self):
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"request body is not valid JSON: {exc}") from None

    def do_OPTIONS(self):
        self._send(200, {})

    # -- routing ---------------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        query = parse_qs(url.query)
        try:
            if url.path == "/variants":
                self._send(
                    200,
                    {
                        "variants": [
                            {
                                "id": v.id,
                                "abstraction_index": v.abstraction_index,
                                "characteristics": dict(sorted(v.characteristics.items())),
                                "objects": len(v.objects),
                            }
                            for v in self.state.base.variants
                        ],
                        "selected_variant_id": self.state.selected_variant_id,
                    },
                )
            elif url.path == "/line/cut":
                level = int(query.get("level", ["1"])[0])
                cut = cut_at_abstraction(self.state.line, level)
                self._send(200, serialize.cut_to_dict(cut))
            elif url.path == "/line/diff":
                variant = query.get("variant", [None])[0]
                if variant is None:
                    raise ParseError("query parameter 'variant' is required")
                delta = diff_to_core(self.state.line, variant)
                self._send(200, serialize.process_delta_to_dict(delta))
            else:
                match = re.fullmatch(r"/sessions/([^/]+)", url.path)
                if match:
                    session = self.state.sessions.get(match.group(1))
                    if session is None:
                        raise NotFoundError(f"no session {match.group(1)!r}")
                    self._send(200, interfaces.session_view(session))
                else:
                    raise NotFoundError(f"no route for GET {url.path}")
        except ProcessError as exc:
            self._fail(exc)
        except ValueError as exc:
            self._send(400, {"error": {"code": "bad-request", "message": str(exc)}})

    def do_POST(self):
        url = urlparse(self.path)
        try:
            body = self._body()
            if url.path == "/selection":
                self._post_selection(body)
            elif url.path == "/sessions":
                self._post_sessions()
            elif url.path == "/logs":
                self._post_logs(body)
            elif url.path == "/discovery":
                self._post_discovery()
            elif url.path == "/delta":
                self._post_delta(body)
            elif url.path == "/refinement/decisions":
                self._post_refinement(body)
            else:
                match = re.fullmatch(r"/sessions/([^/]+)/actions", url.path)
                if match:
                    self._post_session_action(match.group(1), body)
                else:
                    raise NotFoundError(f"no route for POST {url.path}")
        except ProcessError as exc:
            self._fail(exc)

    # -- endpoint bodies ---------------------------------------------------------

    def _post_selection(self, body):
        if "variant_id" in body:
            variant = self.state.base.get(body["variant_id"])  # raises NotFoundError
            with self.state.artifacts_lock:
                self.state.selected_variant_id = variant.id
                self.state.prescriptive = variant
            self._send(200, {"selected_variant_id": variant.id})
            return
        query = serialize.characteristics_from_list(body.get("characteristics", []))
        k = body.get("k", len(self.state.base.variants))
        scores = select_top_k(self.state.base.variants, query, k)
        self._send(
            200,
            {
                "ranking": [
                    {"variant_id": s.variant_id, "score": s.score} for s in scores
                ]
            },
        )

    def _post_sessions(self):
        session_id = uuid.uuid4().hex[:12]
        self.state.sessions[session_id] = interfaces.new_session(session_id, self.state.base)
        self.state.snapshot()
        self._send(201, {"id": session_id, "phase": interfaces.Phase.SELECTING.value})

    def _post_session_action(self, session_id, body):
        lock = self.state.session_lock(session_id)
        with lock:
            session = self.state.sessions.get(session_id)
            if session is None:
                raise NotFoundError(f"no session {session_id!r}")
            action = interfaces.SessionAction(
                type=body.get("type", ""), payload=body.get("payload", {})
            )
            session = interfaces.session_apply(session, action)
            self.state.sessions[session_id] = session
            self.state.snapshot()
        self._send(200, interfaces.session_view(session))

    def _post_logs(self, body):
        text = body.get("text", "")
        log = parse_event_log(text)
        with self.state.artifacts_lock:
            self.state.event_log = log
            self.state.performed = None
        self._send(200, {"events": len(log.events), "warnings": log.unmatched_warnings()})

    def _post_discovery(self):
        with self.state.artifacts_lock:
            if self.state.event_log is None:
                raise PhaseError("post a log before running discovery")
            self.state.performed = discover_process(self.state.event_log)
            performed = self.state.performed
        self._send(200, serialize.model_to_dict(performed))

    def _current_prescriptive(self, body):
        if "model" in body:
            return serialize.model_from_dict(body["model"], "body.model")
        if "variant_id" in body:
            return self.state.base.get(body["variant_id"])
        if self.state.prescriptive is not None:
            return self.state.prescriptive
        raise ProcessError("no prescriptive model: select a variant or pass one in the body")

    def _post_delta(self, body):
        with self.state.artifacts_lock:
            if self.state.event_log is None:
                raise PhaseError("post a log before the delta analysis")
            if self.state.performed is None:
                self.state.performed = discover_process(self.state.event_log)
            prescriptive = self._current_prescriptive(body)
            self.state.prescriptive = prescriptive
            delta = compute_delta(prescriptive, self.state.performed, self.state.event_log)
        self._send(200, _delta_payload(delta))

    def _post_refinement(self, body):
        with self.state.artifacts_lock:
            if self.state.event_log is None or self.state.performed is None:
                raise PhaseError("run discovery and delta before refining")
            prescriptive = self._current_prescriptive(body)
            delta = compute_delta(prescriptive, self.state.performed, self.state.event_log)
            decisions = [
                serialize.decision_from_dict(d, f"decisions[{i}]")
                for i, d in enumerate(body.get("decisions", []))
            ]
            refined, ledger = refine_process(
                prescriptive, delta, decisions, threshold=body.get("theta", 0.5)
            )
            self.state.prescriptive = refined
            new_delta = compute_delta(refined, self.state.performed, self.state.event_log)
        self._send(
            200,
            {
                "model": serialize.model_to_dict(refined),
                "ledger": serialize.ledger_to_dict(ledger),
                "delta": _delta_payload(new_delta),
            },
        )


def make_server(base, listen: str | None = None, snapshot_path=None) -> ThreadingHTTPServer:
    listen = listen or os.environ.get(LISTEN_ENV, DEFAULT_LISTEN)
    host, _, port = listen.rpartition(":")
    if not host:
        raise ProcessError(f"{LISTEN_ENV} must look like host:port, got {listen!r}")
    state = WorkbenchState(base, snapshot_path=snapshot_path)
    handler = type("BoundHandler", (WorkbenchHandler,), {"state": state})
    server = ThreadingHTTPServer((host, int(port)), handler)
    server.state = state
    return server


def serve(base_path, snapshot_path=None) -> None:
    base = serialize.load_base(base_path)
    server = make_server(base, snapshot_path=snapshot_path)
    host, port = server.server_address[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
