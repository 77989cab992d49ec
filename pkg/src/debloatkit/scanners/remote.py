"""Client for a multi-engine scan service with a v3-style file API.

Wire protocol::

    POST {base}/files            multipart field "file"   -> {"data": {"id": ANALYSIS_ID}}
    GET  {base}/analyses/{id}                             -> {"data": {"attributes": {
             "status": "queued" | "in-progress" | "completed",
             "stats": {"malicious": int, "undetected": int, ...},
             "results": {ENGINE: {"category": str, "result": str | null}}}}}

The credential goes in the ``x-apikey`` header and is read from the
``SCANHUB_API_KEY`` environment variable unless given explicitly.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import requests

from ..errors import AuthError, PendingTimeout, ProtocolError, QuotaExceeded
from .report import ScanReport, Verdict, sample_id

log = logging.getLogger(__name__)

API_KEY_ENV = "SCANHUB_API_KEY"

# engines reporting one of these did not analyse the file and are left out
_NOT_ANALYSED = {"type-unsupported", "timeout", "confirmed-timeout", "failure"}
_DETECTED = {"malicious"}


class TokenBucket:
    """Blocking token bucket; callers over the limit wait instead of failing."""

    def __init__(self, rate_per_minute: float, capacity: Optional[float] = None,
                 clock: Callable[[], float] = time.monotonic, sleep: Callable[[float], None] = time.sleep):
        if rate_per_minute <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate_per_minute / 60.0
        self.capacity = capacity if capacity is not None else max(1.0, float(rate_per_minute))
        self.tokens = self.capacity
        self.clock = clock
        self.sleep = sleep
        self._stamp = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self._stamp) * self.rate)
                self._stamp = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                wait = (1 - self.tokens) / self.rate
            self.sleep(wait)


_limiters: dict[tuple[str, float], TokenBucket] = {}
_limiters_lock = threading.Lock()


def shared_limiter(base_url: str, rate_per_minute: float) -> TokenBucket:
    """One limiter per (service, rate) for the whole process."""
    key = (base_url.rstrip("/"), float(rate_per_minute))
    with _limiters_lock:
        if key not in _limiters:
            _limiters[key] = TokenBucket(rate_per_minute)
        return _limiters[key]


@dataclass
class ServiceConfig:
    base_url: str
    api_key: Optional[str] = None
    poll_budget: int = 30
    poll_interval: float = 10.0
    requests_per_minute: float = 4
    max_retries: int = 3
    backoff_base: float = 2.0
    backoff_cap: float = 60.0
    timeout: float = 60.0
    metadata: Mapping[str, bool] = field(default_factory=dict)

    def credential(self) -> str:
        key = self.api_key or os.environ.get(API_KEY_ENV)
        if not key:
            raise AuthError(f"no API key given and {API_KEY_ENV} is not set")
        return key


class RemoteScanner:
    def __init__(self, config: ServiceConfig, session: Optional[requests.Session] = None,
                 sleep: Callable[[float], None] = time.sleep, limiter: Optional[TokenBucket] = None):
        self.config = config
        self.session = session or requests.Session()
        self.sleep = sleep
        self.limiter = limiter or shared_limiter(config.base_url, config.requests_per_minute)

    def _request(self, method: str, url: str, **kwargs) -> dict:
        cfg = self.config
        headers = {"x-apikey": cfg.credential(), "accept": "application/json"}
        attempt = 0
        while True:
            self.limiter.acquire()
            try:
                resp = self.session.request(method, url, headers=headers, timeout=cfg.timeout, **kwargs)
            except requests.RequestException as exc:
                raise ProtocolError(f"{method} {url}: {exc}") from exc
            if resp.status_code in (401, 403):
                raise AuthError(f"{method} {url}: credential rejected ({resp.status_code})")
            if resp.status_code == 429:
                if attempt >= cfg.max_retries:
                    raise QuotaExceeded(f"{method} {url}: still rate limited after {attempt} retries")
                delay = min(cfg.backoff_cap, cfg.backoff_base * 2 ** attempt)
                log.info("rate limited, retrying in %.1fs", delay)
                attempt += 1
                self.sleep(delay)
                continue
            if not 200 <= resp.status_code < 300:
                raise ProtocolError(f"{method} {url}: unexpected status {resp.status_code}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ProtocolError(f"{method} {url}: body is not JSON") from exc

    def submit(self, sample: bytes, filename: str = "sample.bin") -> str:
        doc = self._request("POST", self.config.base_url.rstrip("/") + "/files",
                            files={"file": (filename, sample, "application/octet-stream")})
        try:
            analysis_id = doc["data"]["id"]
        except (KeyError, TypeError):
            raise ProtocolError("upload response lacks data.id") from None
        if not isinstance(analysis_id, str) or not analysis_id:
            raise ProtocolError("upload response has an empty analysis id")
        return analysis_id

    def wait(self, analysis_id: str) -> dict:
        url = f"{self.config.base_url.rstrip('/')}/analyses/{analysis_id}"
        for poll in range(self.config.poll_budget):
            if poll:
                self.sleep(self.config.poll_interval)
            doc = self._request("GET", url)
            try:
                attrs = doc["data"]["attributes"]
                status = attrs["status"]
            except (KeyError, TypeError):
                raise ProtocolError("analysis response lacks data.attributes.status") from None
            if status == "completed":
                return attrs
            if status not in ("queued", "in-progress"):
                raise ProtocolError(f"unknown analysis status {status!r}")
        raise PendingTimeout(f"analysis {analysis_id} not finished after {self.config.poll_budget} polls")

    def scan(self, sample: bytes, filename: str = "sample.bin") -> ScanReport:
        attrs = self.wait(self.submit(sample, filename))
        return report_from_attributes(sample_id(sample), attrs, self.config.metadata)


def report_from_attributes(sid: str, attrs: dict, metadata: Mapping[str, bool] = ()) -> ScanReport:
    results = attrs.get("results")
    if not isinstance(results, dict):
        raise ProtocolError("completed analysis lacks a results map")
    verdicts = {}
    for engine, entry in results.items():
        if not isinstance(entry, dict) or "category" not in entry:
            raise ProtocolError(f"malformed result for engine {engine!r}")
        if entry["category"] in _NOT_ANALYSED:
            continue
        verdicts[engine] = Verdict(entry["category"] in _DETECTED, entry.get("result"))
    report = ScanReport(sid, verdicts, dict(metadata or {}))
    stats = attrs.get("stats")
    if isinstance(stats, dict) and "malicious" in stats and stats["malicious"] != report.positives:
        raise ProtocolError(
            f"stats report {stats['malicious']} malicious but results hold {report.positives}")
    return report


def scan_remote(sample: bytes, service: ServiceConfig, **kwargs) -> ScanReport:
    """Upload, poll to completion, and map per-engine results."""
    return RemoteScanner(service, **kwargs).scan(sample)
