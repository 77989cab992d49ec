from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union


def sample_id(data: bytes) -> str:
    """Content identity used to pair before/after scans."""
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class Verdict:
    detected: bool
    label: Optional[str] = None


@dataclass(frozen=True)
class ScanReport:
    sample_id: str
    verdicts: Mapping[str, Verdict]
    advertises_ai: Mapping[str, bool] = field(default_factory=dict)
    positives: int = -1
    total_engines: int = -1

    def __post_init__(self):
        verdicts = dict(sorted(self.verdicts.items()))
        object.__setattr__(self, "verdicts", verdicts)
        object.__setattr__(self, "advertises_ai", {e: bool(self.advertises_ai.get(e, False)) for e in verdicts})
        positives = sum(1 for v in verdicts.values() if v.detected)
        if self.positives == -1:
            object.__setattr__(self, "positives", positives)
        elif self.positives != positives:
            raise ValueError(f"positives={self.positives} but {positives} verdicts are detections")
        if self.total_engines == -1:
            object.__setattr__(self, "total_engines", len(verdicts))
        elif self.total_engines != len(verdicts):
            raise ValueError("total_engines must equal the number of verdicts")

    @property
    def detected_by(self) -> list[str]:
        return [e for e, v in self.verdicts.items() if v.detected]

    @property
    def ai_engines(self) -> int:
        return sum(1 for flag in self.advertises_ai.values() if flag)

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "positives": self.positives,
            "total_engines": self.total_engines,
            "verdicts": {e: {"detected": v.detected, "label": v.label} for e, v in self.verdicts.items()},
            "advertises_ai": dict(self.advertises_ai),
        }


def load_engine_metadata(path: Union[str, os.PathLike, None] = None) -> dict[str, bool]:
    """Engine name -> advertises_ai, from ``{"Engine": {"advertises_ai": bool}}`` JSON.

    Without a path the bundled placeholder file is used.
    """
    if path is None:
        path = Path(__file__).resolve().parent.parent / "data" / "engine_metadata.json"
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return {name: bool(entry.get("advertises_ai", False)) for name, entry in doc.items()
            if not name.startswith("_")}
