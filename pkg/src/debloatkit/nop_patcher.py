"""Overwrite planned byte ranges of an ELF image with NOP instructions.

Instructions are never deleted: the sizes of the file, its sections and its
segments stay fixed, so no jump or call target moves.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .binary_image import ElfImage, parse_elf, segment_for_vaddr, vaddr_to_offset
from .errors import (
    LengthMismatch,
    MisalignedRegion,
    NonExecutableTarget,
    OutOfBounds,
    OverlappingRegions,
    PlanFormatError,
    PlanTargetMismatch,
)

DEFAULT_SUFFIX = ".debloated"


class Addressing(enum.Enum):
    VIRTUAL = "virtual"
    FILE_OFFSET = "file_offset"


@dataclass(frozen=True)
class PatchRegion:
    addressing: Addressing
    start: int
    length: int
    note: str = ""

    def __post_init__(self):
        if not isinstance(self.addressing, Addressing):
            object.__setattr__(self, "addressing", Addressing(self.addressing))
        if self.length <= 0:
            raise ValueError(f"region length must be positive, got {self.length}")
        if self.start < 0:
            raise ValueError(f"region start must be non-negative, got {self.start}")


@dataclass(frozen=True)
class PatchPlan:
    target_id: str
    regions: tuple[PatchRegion, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))

    @classmethod
    def from_dict(cls, doc: dict) -> "PatchPlan":
        try:
            regions = tuple(
                PatchRegion(
                    addressing=Addressing(r["addressing"]),
                    start=_parse_address(r["start"]),
                    length=int(r["length"]),
                    note=str(r.get("note", "")),
                )
                for r in doc["regions"]
            )
            return cls(str(doc.get("target_id", "")), regions)
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanFormatError(f"invalid patch plan: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "regions": [
                {
                    "addressing": r.addressing.value,
                    "start": hex(r.start),
                    "length": r.length,
                    "note": r.note,
                }
                for r in self.regions
            ],
        }

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PatchPlan":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise PlanFormatError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)

    def dump(self, path: str | os.PathLike) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def _parse_address(value) -> int:
    if isinstance(value, bool):
        raise ValueError("boolean is not an address")
    if isinstance(value, int):
        return value
    text = str(value).strip().lower()
    if text.startswith("0x"):
        return int(text, 16)
    return int(text, 10)


@dataclass(frozen=True)
class PatchOutcome:
    patched_bytes: bytes
    regions_applied: int
    bytes_overwritten: int
    bytes_changed: int


def check_target(plan: PatchPlan, path: str | os.PathLike, data: bytes) -> None:
    """Reject a plan whose target_id names a different file.

    An empty ``target_id`` or ``"*"`` matches anything; otherwise the id must
    be the file's base name or its MD5/SHA-256 hex digest.
    """
    tid = plan.target_id.strip()
    if tid in ("", "*"):
        return
    accepted = {
        os.path.basename(os.fspath(path)),
        hashlib.md5(data).hexdigest(),
        hashlib.sha256(data).hexdigest(),
    }
    if tid.lower() not in {a.lower() for a in accepted}:
        raise PlanTargetMismatch(f"plan targets {tid!r}, not {os.path.basename(os.fspath(path))!r}")


def resolve_regions(image: ElfImage, plan: PatchPlan, allow_nonexec: bool = False) -> list[tuple[int, int, PatchRegion]]:
    """Translate and validate plan regions into sorted ``(offset, length, region)``."""
    width = image.arch.instruction_width
    code = image.executable_ranges()
    resolved = []
    for region in plan.regions:
        if region.addressing is Addressing.VIRTUAL:
            offset = vaddr_to_offset(image, region.start)
            seg = segment_for_vaddr(image, region.start)
            if region.start + region.length > seg.vaddr + seg.file_size:
                raise OutOfBounds(
                    f"region {region.start:#x}+{region.length:#x} runs past its load segment"
                )
        else:
            offset = region.start
        end = offset + region.length
        if end > len(image.raw):
            raise OutOfBounds(f"region [{offset:#x}, {end:#x}) exceeds file length {len(image.raw):#x}")

        if width > 1 and region.length % width:
            raise MisalignedRegion(
                f"length {region.length} is not a multiple of {width} on {image.arch}"
            )
        container = next(((lo, hi) for lo, hi in code if lo <= offset and end <= hi), None)
        if container is None:
            if not allow_nonexec:
                raise NonExecutableTarget(f"region [{offset:#x}, {end:#x}) is not inside an executable section")
            sec = image.section_at(offset)
            container = (sec.file_offset, sec.end) if sec is not None else (0, len(image.raw))
        if width > 1 and (offset - container[0]) % width:
            raise MisalignedRegion(
                f"region start {offset:#x} is not {width}-byte aligned to its section at {container[0]:#x}"
            )
        resolved.append((offset, region.length, region))

    resolved.sort(key=lambda item: item[0])
    for (a_off, a_len, a), (b_off, _, b) in zip(resolved, resolved[1:]):
        if b_off < a_off + a_len:
            raise OverlappingRegions(
                f"regions at {a_off:#x} ({a.note or 'unnamed'}) and {b_off:#x} ({b.note or 'unnamed'}) overlap"
            )
    return resolved


def apply_patch_plan(image: ElfImage, plan: PatchPlan, allow_nonexec: bool = False) -> PatchOutcome:
    """NOP-fill every region of ``plan``; all other bytes are left as they were.

    The fill pattern is phase-anchored at each region start.
    """
    resolved = resolve_regions(image, plan, allow_nonexec=allow_nonexec)
    nop = image.arch.nop_pattern
    out = bytearray(image.raw)
    overwritten = 0
    for offset, length, _ in resolved:
        reps = -(-length // len(nop))
        out[offset:offset + length] = (nop * reps)[:length]
        overwritten += length
    patched = bytes(out)
    return PatchOutcome(
        patched_bytes=patched,
        regions_applied=len(resolved),
        bytes_overwritten=overwritten,
        bytes_changed=diff_bytes(image.raw, patched),
    )


def diff_bytes(original: bytes, modified: bytes) -> int:
    """Number of positions whose byte value differs, like ``cmp -l | wc -l``."""
    if len(original) != len(modified):
        raise LengthMismatch(f"lengths differ: {len(original)} vs {len(modified)}")
    if original == modified:
        return 0
    a = int.from_bytes(original, "big")
    b = int.from_bytes(modified, "big")
    x = (a ^ b).to_bytes(len(original), "big")
    return len(x) - x.count(0)


def output_path(path: str | os.PathLike, suffix: str = DEFAULT_SUFFIX, out: Optional[str | os.PathLike] = None) -> Path:
    src = Path(path)
    dest = Path(out) if out is not None else src.with_name(src.name + suffix)
    if dest.resolve() == src.resolve():
        raise ValueError("refusing to overwrite the original file in place")
    return dest


def patch_file(path: str | os.PathLike, plan: PatchPlan, out: Optional[str | os.PathLike] = None,
               suffix: str = DEFAULT_SUFFIX, allow_nonexec: bool = False,
               dry_run: bool = False) -> tuple[PatchOutcome, Path]:
    data = Path(path).read_bytes()
    check_target(plan, path, data)
    outcome = apply_patch_plan(parse_elf(data), plan, allow_nonexec=allow_nonexec)
    dest = output_path(path, suffix, out)
    if not dry_run:
        dest.write_bytes(outcome.patched_bytes)
    return outcome, dest

