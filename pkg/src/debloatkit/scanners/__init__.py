"""Scan backends: an offline signature ensemble and a remote multi-engine service."""

from .local import Signature, SignatureDB, scan_local
from .remote import API_KEY_ENV, RemoteScanner, ServiceConfig, TokenBucket, scan_remote, shared_limiter
from .report import ScanReport, Verdict, load_engine_metadata, sample_id

__all__ = [
    "API_KEY_ENV", "RemoteScanner", "ScanReport", "ServiceConfig", "Signature",
    "SignatureDB", "TokenBucket", "Verdict", "load_engine_metadata", "sample_id",
    "scan_local", "scan_remote", "shared_limiter",
]
