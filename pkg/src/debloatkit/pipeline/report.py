"""Render comparison rows as CSV or a Markdown pipe table, and read CSV back."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Optional

from ..errors import ConfigError
from ..metrics import ComparisonRow, reduced_fraction

COLUMNS = (
    "name", "language_or_arch", "type", "original_size", "debloated_size", "bytes_modified",
    "size_reduction_pct", "original_detections", "debloated_detections", "detection_reduction_pct",
)
FOOTER_KEY = "reduced_fraction"


def _pct(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.2f}"


def _opt(value) -> str:
    return "" if value is None else str(value)


def _cells(row: ComparisonRow) -> list[str]:
    if row.error is not None:
        # measurements are meaningless for a failed sample; leave them blank
        return [row.name, row.language_or_arch, _opt(row.malware_type)] + [""] * (len(COLUMNS) - 3)
    return [
        row.name, row.language_or_arch, _opt(row.malware_type), str(row.original_size),
        _opt(row.debloated_size), _opt(row.bytes_modified), _pct(row.size_reduction_pct),
        str(row.original_detections), str(row.debloated_detections), _pct(row.detection_reduction_pct),
    ]


def aggregate(rows: Iterable[ComparisonRow]) -> int:
    """reduced_fraction over rows that completed; 0 when there are none."""
    ok = [r for r in rows if r.error is None]
    return reduced_fraction(ok) if ok else 0


def emit_report(rows: Iterable[ComparisonRow], format: str = "csv") -> str:
    rows = list(rows)
    footer = aggregate(rows)
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow(_cells(row))
        w.writerow([FOOTER_KEY, footer])
        return buf.getvalue()
    if format == "markdown":
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "|".join("---" for _ in COLUMNS) + "|"]
        for row in rows:
            cells = [c.replace("|", "\\|") for c in _cells(row)]
            lines.append("| " + " | ".join(cells) + " |")
        lines += ["", f"{FOOTER_KEY}: {footer}"]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def _int(cell: str) -> Optional[int]:
    return int(cell) if cell != "" else None


def _float(cell: str) -> Optional[float]:
    return float(cell) if cell != "" else None


def read_csv_report(text: str) -> list[ComparisonRow]:
    """Parse a CSV written by :func:`emit_report`; the footer is recomputed, not trusted."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != COLUMNS:
        raise ConfigError("not a comparison report: unexpected CSV header")
    rows = []
    for cells in reader:
        if not cells or cells[0] == FOOTER_KEY:
            continue
        if len(cells) != len(COLUMNS):
            raise ConfigError(f"report row has {len(cells)} cells, expected {len(COLUMNS)}")
        rec = dict(zip(COLUMNS, cells))
        if rec["original_detections"] == "":
            rows.append(ComparisonRow.failed(rec["name"], "error", rec["language_or_arch"], rec["type"] or None))
            continue
        try:
            rows.append(ComparisonRow(
                name=rec["name"], language_or_arch=rec["language_or_arch"],
                malware_type=rec["type"] or None, original_size=int(rec["original_size"]),
                debloated_size=_int(rec["debloated_size"]), bytes_modified=_int(rec["bytes_modified"]),
                size_reduction_pct=_float(rec["size_reduction_pct"]),
                original_detections=int(rec["original_detections"]),
                debloated_detections=int(rec["debloated_detections"]),
                detection_reduction_pct=_float(rec["detection_reduction_pct"]),
            ))
        except ValueError as exc:
            raise ConfigError(f"bad report row for {rec['name']!r}: {exc}") from exc
    return rows
