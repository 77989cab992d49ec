"""Offline multi-engine scanner: each engine is a set of byte signatures."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from ..errors import DuplicateSignatureId, PlanFormatError
from .report import ScanReport, Verdict, sample_id

MIN_PATTERN = 4


@dataclass(frozen=True)
class Signature:
    id: str
    pattern: bytes
    engine_name: str

    def __post_init__(self):
        if len(self.pattern) < MIN_PATTERN:
            raise ValueError(f"signature {self.id!r}: pattern shorter than {MIN_PATTERN} bytes")


@dataclass(frozen=True)
class SignatureDB:
    signatures: tuple[Signature, ...]
    # engines that take part even without signatures of their own
    extra_engines: tuple[str, ...] = ()

    @property
    def engines(self) -> list[str]:
        return sorted({s.engine_name for s in self.signatures} | set(self.extra_engines))

    @classmethod
    def load(cls, path: Union[str, os.PathLike]) -> "SignatureDB":
        """Read ``{"signatures": [{"id", "engine", "pattern" | "pattern_hex"}], "engines": [...]}``."""
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
            sigs = []
            for entry in doc["signatures"]:
                if "pattern_hex" in entry:
                    pattern = bytes.fromhex(entry["pattern_hex"])
                else:
                    pattern = str(entry["pattern"]).encode("utf-8")
                sigs.append(Signature(str(entry["id"]), pattern, str(entry["engine"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanFormatError(f"invalid signature database {path}: {exc}") from exc
        db = cls(tuple(sigs), tuple(doc.get("engines", ())))
        _check_unique(db.signatures)
        return db

    def to_dict(self) -> dict:
        return {
            "signatures": [
                {"id": s.id, "engine": s.engine_name, "pattern_hex": s.pattern.hex()}
                for s in self.signatures
            ],
            "engines": list(self.extra_engines),
        }


def _check_unique(db: Iterable[Signature]) -> None:
    seen = set()
    for sig in db:
        if sig.id in seen:
            raise DuplicateSignatureId(f"signature id {sig.id!r} appears twice")
        seen.add(sig.id)


def scan_local(sample: bytes, db: Union[SignatureDB, Sequence[Signature]],
               metadata: Optional[Mapping[str, bool]] = None) -> ScanReport:
    """An engine detects the sample iff any of its patterns occurs in it."""
    if not isinstance(db, SignatureDB):
        db = SignatureDB(tuple(db))
    _check_unique(db.signatures)
    sample = bytes(sample)
    hits: dict[str, list[str]] = {e: [] for e in db.engines}
    for sig in db.signatures:
        if sig.pattern in sample:
            hits[sig.engine_name].append(sig.id)
    verdicts = {
        engine: Verdict(bool(ids), ",".join(sorted(ids)) or None)
        for engine, ids in hits.items()
    }
    return ScanReport(sample_id(sample), verdicts, dict(metadata or {}))
