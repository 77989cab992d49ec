"""Whole-line removal of string features (comments, banners, usage text)."""

from __future__ import annotations

import difflib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from ..errors import LineOutOfRange, PlanFormatError
from .languages import (
    LANGUAGES,
    LangName,
    SourceLanguage,
    detect_language,
    language_by_name,
)
from .lexer import split_lines
from .planner import (
    BANNER_PRINT,
    COMMENT,
    DEFAULT_DETECTORS,
    DETECTORS,
    EXPLICIT,
    PRINT_ONLY_FUNCTION,
    USAGE_ERROR_BLOCK,
    plan_lines,
)

__all__ = [
    "BANNER_PRINT", "COMMENT", "DEFAULT_DETECTORS", "DETECTORS", "EXPLICIT",
    "PRINT_ONLY_FUNCTION", "USAGE_ERROR_BLOCK", "LANGUAGES", "LangName",
    "RemovalPlan", "SourceLanguage", "apparent_size", "apply_removals",
    "decode_source", "detect_language", "encode_source", "explicit_plan",
    "language_by_name", "line_count", "parse_line_ranges", "plan_removals",
    "preview_diff",
]

_TAGS = set(DETECTORS) | {EXPLICIT}


@dataclass(frozen=True)
class RemovalPlan:
    target_id: str
    lines: tuple[int, ...] = ()
    reasons: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        lines = tuple(sorted(set(self.lines)))
        object.__setattr__(self, "lines", lines)
        reasons = {int(k): v for k, v in dict(self.reasons).items()}
        if set(reasons) != set(lines):
            raise ValueError("reasons must cover exactly the planned lines")
        bad = {v for v in reasons.values() if v not in _TAGS}
        if bad:
            raise ValueError(f"unknown reason tags {sorted(bad)}")
        if lines and lines[0] < 1:
            raise LineOutOfRange("line numbers are 1-based")
        object.__setattr__(self, "reasons", reasons)

    def __len__(self) -> int:
        return len(self.lines)

    def by_reason(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for line in self.lines:
            out.setdefault(self.reasons[line], []).append(line)
        return out

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "lines": list(self.lines),
            "reasons": {str(k): self.reasons[k] for k in self.lines},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RemovalPlan":
        try:
            lines = [int(x) for x in doc["lines"]]
            reasons = doc.get("reasons")
            if reasons is None:
                reasons = {ln: EXPLICIT for ln in lines}
            return cls(str(doc.get("target_id", "")), tuple(lines), {int(k): str(v) for k, v in reasons.items()})
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanFormatError(f"invalid removal plan: {exc}") from exc

    @classmethod
    def load(cls, path: Union[str, os.PathLike]) -> "RemovalPlan":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise PlanFormatError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)

    def dump(self, path: Union[str, os.PathLike]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def line_count(content: str) -> int:
    return len(split_lines(content))


def plan_removals(content: str, lang: SourceLanguage, detectors: Iterable[str] = DEFAULT_DETECTORS,
                  target_id: str = "") -> RemovalPlan:
    """Run the requested detectors over ``content``.

    Raises UnsupportedLanguage for ``Unknown``; use :func:`explicit_plan` there.
    """
    reasons = plan_lines(content, lang, detectors)
    return RemovalPlan(target_id, tuple(reasons), reasons)


_RANGE = re.compile(r"^\s*(\d+)\s*(?:-\s*(\d+))?\s*$")


def parse_line_ranges(spec: str) -> list[int]:
    """``"26-41,45"`` -> ``[26, ..., 41, 45]``."""
    out: list[int] = []
    for part in spec.split(","):
        if not part.strip():
            continue
        m = _RANGE.match(part)
        if not m:
            raise ValueError(f"bad line range {part!r}")
        lo = int(m.group(1))
        hi = int(m.group(2) or lo)
        if hi < lo:
            raise ValueError(f"descending range {part!r}")
        out.extend(range(lo, hi + 1))
    return out


def explicit_plan(lines: Union[str, Iterable[int]], target_id: str = "",
                  content: Optional[str] = None) -> RemovalPlan:
    if isinstance(lines, str):
        lines = parse_line_ranges(lines)
    lines = sorted(set(lines))
    if content is not None:
        _check_range(lines, line_count(content))
    return RemovalPlan(target_id, tuple(lines), {ln: EXPLICIT for ln in lines})


def _check_range(lines: Iterable[int], total: int) -> None:
    for ln in lines:
        if not 1 <= ln <= total:
            raise LineOutOfRange(f"line {ln} outside 1..{total}")


def apply_removals(content: str, plan: RemovalPlan) -> str:
    """Drop the planned lines; retained lines keep their exact bytes."""
    kept = split_lines(content)
    _check_range(plan.lines, len(kept))
    drop = set(plan.lines)
    return "".join(line for i, line in enumerate(kept, 1) if i not in drop)


def preview_diff(content: str, plan: RemovalPlan, name: str = "source") -> str:
    after = apply_removals(content, plan)
    return "".join(difflib.unified_diff(
        split_lines(content), split_lines(after), fromfile=name, tofile=name + " (slimmed)"))


def decode_source(data: bytes) -> str:
    """Bytes to text so that :func:`encode_source` restores them exactly."""
    return data.decode("utf-8", "surrogateescape")


def encode_source(text: str) -> bytes:
    return text.encode("utf-8", "surrogateescape")


def apparent_size(content_or_file: Union[bytes, bytearray, memoryview, str, os.PathLike]) -> int:
    """Byte length, as ``ls -l`` reports it.

    Byte-like values are measured directly, ``str`` is measured as its encoded
    bytes and a path-like object is measured on disk.
    """
    if isinstance(content_or_file, (bytes, bytearray, memoryview)):
        return len(content_or_file)
    if isinstance(content_or_file, str):
        return len(encode_source(content_or_file))
    return os.stat(content_or_file).st_size
