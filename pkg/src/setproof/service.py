"""Small HTTP service exposing the checker.

POST /check  {"text": "...", "backend": "rule"}  -> CheckReport JSON
GET  /health                                     -> {"status": "ok"}
GET  /grammar                                    -> accepted cue phrases

Requests are independent and stateless; each builds a fresh pipeline.
Live LLM calls are serialized through one slot, everything else runs
concurrently.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .feedback import report_json
from .frontend import formalize_document
from .grammar import GRAMMAR_SUMMARY
from .llm import (
    HttpTransport, MockTransport, PromptConfig, TransportError,
    llm_formalize_document,
)
from .pipeline import check_document

_LIVE_SLOT = threading.Semaphore(1)


class _ThrottledTransport:
    def __init__(self, inner):
        self.inner = inner

    def send(self, request):
        with _LIVE_SLOT:
            return self.inner.send(request)


class CheckerHandler(BaseHTTPRequestHandler):
    server_version = "setproof"
    default_backend = "rule"
    mock_path: Optional[str] = None
    prompt_config: Optional[PromptConfig] = None

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send(self, status: int, body: bytes,
              content_type: str = "application/json; charset=utf-8"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict):
        self._send(status, json.dumps(payload, ensure_ascii=False).encode("utf-8"))

    def _send_error(self, status: int, code: str, message: str):
        self._send_json(status, {"code": code, "message": message})

    def do_GET(self):
        if self.path == "/health":
            self._send_json(200, {"status": "ok"})
            return
        if self.path == "/grammar":
            self._send_json(200, {"cues": GRAMMAR_SUMMARY})
            return
        self._send_error(404, "NOT_FOUND", f"no such endpoint: {self.path}")

    def do_POST(self):
        if self.path != "/check":
            self._send_error(404, "NOT_FOUND", f"no such endpoint: {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError):
            self._send_error(400, "BAD_REQUEST", "body must be JSON")
            return
        text = payload.get("text")
        if not isinstance(text, str) or not text.strip():
            self._send_error(400, "MISSING_TEXT",
                             "the request needs a non-empty 'text' field")
            return
        backend = payload.get("backend") or self.default_backend
        try:
            doc = self._formalize(text, backend)
        except (TransportError, OSError, json.JSONDecodeError) as exc:
            self._send_error(502, "TRANSPORT_ERROR", str(exc))
            return
        except ValueError as exc:
            self._send_error(400, "BAD_BACKEND", str(exc))
            return
        report = check_document(doc)
        if doc.transport_error:
            self._send_error(502, "TRANSPORT_ERROR", doc.transport_error)
            return
        self._send(200, report_json(report).encode("utf-8"))

    def _formalize(self, text: str, backend: str):
        if backend == "rule":
            return formalize_document(text)
        if backend == "llm":
            cfg = self.prompt_config or _default_config()
            return llm_formalize_document(
                text, cfg, _ThrottledTransport(HttpTransport()))
        if backend == "llm-mock":
            if not self.mock_path:
                raise ValueError("the service was started without a mock file")
            cfg = self.prompt_config or _default_config()
            return llm_formalize_document(
                text, cfg, MockTransport.from_file(self.mock_path))
        raise ValueError(f"unknown backend {backend!r}")


def _default_config() -> PromptConfig:
    from .cli import default_prompt_config
    return default_prompt_config()


def make_server(port: int = 8080, default_backend: str = "rule",
                mock_path: Optional[str] = None) -> ThreadingHTTPServer:
    handler = type("Handler", (CheckerHandler,), {
        "default_backend": default_backend,
        "mock_path": mock_path,
    })
    return ThreadingHTTPServer(("", port), handler)


def serve(port: int = 8080, default_backend: str = "rule",
          mock_path: Optional[str] = None) -> None:
    server = make_server(port, default_backend, mock_path)
    try:
        server.serve_forever()
    finally:
        server.server_close()
