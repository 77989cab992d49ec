"""In-process stand-in for the remote scan service, used by tests and demos.

It speaks the same wire protocol as :mod:`debloatkit.scanners.remote`, binds
to 127.0.0.1 on an ephemeral port and replays a scripted behaviour.
"""

from __future__ import annotations

import email.parser
import email.policy
import itertools
import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional

from .report import ScanReport


@dataclass
class Script:
    """What the mock does.

    ``detected``/``engines`` give the stats for every completed analysis unless
    ``detect`` is set, in which case it is called on the uploaded bytes.
    ``pending_polls`` is how many GETs answer "queued" before completing;
    ``None`` keeps the analysis queued forever.
    """

    detected: int = 0
    engines: int = 0
    pending_polls: Optional[int] = 0
    api_key: Optional[str] = "test-key"
    reject_auth: bool = False
    rate_limit_first: int = 0
    malformed: bool = False
    detect: Optional[Callable[[bytes], ScanReport]] = None


@dataclass
class _Analysis:
    sample: bytes
    polls: int = 0


@dataclass
class LoggedRequest:
    method: str
    path: str
    api_key: Optional[str]
    status: int


class MockScanService:
    def __init__(self, script: Optional[Script] = None, **kwargs):
        self.script = script or Script(**kwargs)
        self.requests: list[LoggedRequest] = []
        self._analyses: dict[str, _Analysis] = {}
        self._ids = itertools.count(1)
        self._limited = 0
        self._lock = threading.Lock()
        self._server: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/api/v3"

    def start(self) -> "MockScanService":
        service = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                service._handle(self, "POST")

            def do_GET(self):
                service._handle(self, "GET")

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, kwargs={"poll_interval": 0.05},
                                        daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> "MockScanService":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    # request handling

    def _handle(self, h: BaseHTTPRequestHandler, method: str) -> None:
        key = h.headers.get("x-apikey")
        status, body = self._route(h, method, key)
        with self._lock:
            self.requests.append(LoggedRequest(method, h.path, key, status))
        payload = body if isinstance(body, bytes) else json.dumps(body).encode()
        h.send_response(status)
        h.send_header("Content-Type", "application/json")
        h.send_header("Content-Length", str(len(payload)))
        h.end_headers()
        h.wfile.write(payload)

    def _route(self, h, method, key):
        sc = self.script
        length = int(h.headers.get("Content-Length") or 0)
        raw = h.rfile.read(length) if length else b""
        if sc.reject_auth or (sc.api_key is not None and key != sc.api_key):
            return 401, {"error": {"code": "WrongCredentialsError"}}
        with self._lock:
            if self._limited < sc.rate_limit_first:
                self._limited += 1
                return 429, {"error": {"code": "QuotaExceededError"}}
        if sc.malformed:
            return 200, b"{not json"
        path = h.path.split("?", 1)[0]
        prefix = "/api/v3"
        if not path.startswith(prefix):
            return 404, {"error": {"code": "NotFoundError"}}
        path = path[len(prefix):]
        if method == "POST" and path == "/files":
            sample = _multipart_file(h.headers.get("Content-Type", ""), raw)
            if sample is None:
                return 400, {"error": {"code": "BadRequestError"}}
            with self._lock:
                aid = f"an-{next(self._ids)}"
                self._analyses[aid] = _Analysis(sample)
            return 200, {"data": {"type": "analysis", "id": aid}}
        if method == "GET" and path.startswith("/analyses/"):
            aid = path[len("/analyses/"):]
            with self._lock:
                an = self._analyses.get(aid)
                if an is None:
                    return 404, {"error": {"code": "NotFoundError"}}
                an.polls += 1
                polls = an.polls
            if sc.pending_polls is None or polls <= sc.pending_polls:
                return 200, {"data": {"id": aid, "attributes": {"status": "queued", "stats": {}, "results": {}}}}
            return 200, {"data": {"id": aid, "attributes": self._completed(an.sample)}}
        return 404, {"error": {"code": "NotFoundError"}}

    def _completed(self, sample: bytes) -> dict:
        sc = self.script
        if sc.detect is not None:
            rep = sc.detect(sample)
            results = {
                e: {"category": "malicious" if v.detected else "undetected", "result": v.label}
                for e, v in rep.verdicts.items()
            }
        else:
            results = {
                f"Engine{i:02d}": {
                    "category": "malicious" if i < sc.detected else "undetected",
                    "result": "Mock.Generic" if i < sc.detected else None,
                }
                for i in range(sc.engines)
            }
        malicious = sum(1 for r in results.values() if r["category"] == "malicious")
        return {
            "status": "completed",
            "stats": {"malicious": malicious, "suspicious": 0, "undetected": len(results) - malicious,
                      "harmless": 0},
            "results": results,
        }


def _multipart_file(content_type: str, body: bytes) -> Optional[bytes]:
    if not content_type.startswith("multipart/form-data"):
        return None
    msg = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(
        b"Content-Type: " + content_type.encode() + b"\r\n\r\n" + body)
    for part in msg.iter_parts():
        if part.get_param("name", header="content-disposition") == "file":
            return part.get_payload(decode=True)
    return None
