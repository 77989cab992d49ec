"""Size and detection arithmetic for the before/after comparison tables.

Per-row percentages round half-up to two decimals (3/32 = 9.375 must print
as 9.38).  The corpus-level fraction of improved samples truncates instead
(14/18 = 77.78 prints as 77).  All arithmetic is exact (Fraction/Decimal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Optional

from .errors import EmptyInput, ZeroOriginal, ZeroTotal

_CENT = Decimal("0.01")


def _round_half_up(value: Fraction, quantum: Decimal = _CENT) -> Decimal:
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    # 28 significant digits is plenty for byte counts; quantize does the rounding.
    return exact.quantize(quantum, rounding=ROUND_HALF_UP)


def size_reduction(original: int, debloated: int) -> float:
    if original <= 0:
        raise ZeroOriginal("original size must be positive")
    return float(_round_half_up(Fraction(100 * (original - debloated), original)))


def detection_reduction(original_pos: int, debloated_pos: int) -> float:
    """Percentage drop in positives; 0.0 when nothing detected the original.

    Negative values (more detections after debloating) are returned as-is.
    """
    if original_pos == 0:
        return 0.0
    return float(_round_half_up(Fraction(100 * (original_pos - debloated_pos), original_pos)))


def reduced_fraction(rows: Iterable["ComparisonRow"]) -> int:
    """Integer percent (truncated) of rows whose detection reduction is > 0."""
    rows = list(rows)
    if not rows:
        raise EmptyInput("reduced_fraction needs at least one row")
    improved = sum(1 for r in rows if (r.detection_reduction_pct or 0) > 0)
    return math.floor(Fraction(100 * improved, len(rows)))


def ai_engine_fraction(flagged: int, total: int) -> int:
    if total <= 0:
        raise ZeroTotal("total engine count must be positive")
    return int(_round_half_up(Fraction(100 * flagged, total), Decimal("1")))


@dataclass
class ComparisonRow:
    """One before/after record.

    Source rows carry ``debloated_size``; binary rows keep their size and
    carry ``bytes_modified`` instead.
    """

    name: str
    language_or_arch: str
    original_size: int
    original_detections: int
    debloated_detections: int
    malware_type: Optional[str] = None
    debloated_size: Optional[int] = None
    bytes_modified: Optional[int] = None
    size_reduction_pct: Optional[float] = None
    detection_reduction_pct: Optional[float] = None
    error: Optional[str] = None
    error_detail: Optional[str] = None

    def __post_init__(self):
        if self.error is None:
            if (self.debloated_size is None) == (self.bytes_modified is None):
                raise ValueError("exactly one of debloated_size / bytes_modified must be set")
            if self.detection_reduction_pct is None:
                self.detection_reduction_pct = detection_reduction(
                    self.original_detections, self.debloated_detections)
            if self.size_reduction_pct is None and self.debloated_size is not None:
                self.size_reduction_pct = size_reduction(self.original_size, self.debloated_size)

    @classmethod
    def failed(cls, name: str, error: str, language_or_arch: str = "",
               malware_type: Optional[str] = None, original_size: int = 0,
               error_detail: Optional[str] = None) -> "ComparisonRow":
        return cls(name=name, language_or_arch=language_or_arch, original_size=original_size,
                   original_detections=0, debloated_detections=0,
                   malware_type=malware_type, error=error, error_detail=error_detail)

    @property
    def is_binary(self) -> bool:
        return self.bytes_modified is not None

    def as_dict(self) -> dict:
        return asdict(self)
