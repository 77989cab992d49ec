"""Scan, transform, measure and rescan every sample of an experiment.

No behavioural check is made on the debloated output: whether it still
works is left to the experimenter.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .. import source_slimmer as slim
from ..binary_image import parse_elf
from ..errors import DebloatError, PlanNotFound
from ..metrics import ComparisonRow
from ..nop_patcher import PatchPlan, apply_patch_plan, check_target, diff_bytes, output_path
from ..scanners import ScanReport, ServiceConfig, SignatureDB, load_engine_metadata, scan_local, scan_remote
from .config import ExperimentConfig, SampleSpec

log = logging.getLogger(__name__)

Scanner = Callable[[bytes], ScanReport]


@dataclass
class SampleResult:
    row: ComparisonRow
    output: Optional[Path] = None
    preview: Optional[str] = None


def make_scanner(config: ExperimentConfig) -> Scanner:
    metadata = load_engine_metadata(config.engine_metadata_path) if config.engine_metadata_path else {}
    if config.backend == "local":
        db = SignatureDB.load(config.signature_db_path) if config.signature_db_path else SignatureDB(())
        return lambda data: scan_local(data, db, metadata)
    fields = {k: v for k, v in config.remote.items() if k in ServiceConfig.__dataclass_fields__}
    service = ServiceConfig(**{**fields, "metadata": metadata})
    return lambda data: scan_remote(data, service)


def _load_plan(sample: SampleSpec):
    if sample.plan_path is None:
        return None
    if not sample.plan_path.is_file():
        raise PlanNotFound(f"{sample.plan_path} does not exist")
    if sample.kind == "binary":
        return PatchPlan.load(sample.plan_path)
    return slim.RemovalPlan.load(sample.plan_path)


def _dest(sample: SampleSpec, config: ExperimentConfig) -> Path:
    opts = config.options
    out = opts.output_dir / (sample.path.name + opts.apply_suffix) if opts.output_dir else None
    return output_path(sample.path, opts.apply_suffix, out)


def process_sample(sample: SampleSpec, config: ExperimentConfig, scanner: Scanner,
                   write: bool = True) -> SampleResult:
    name = sample.display_name
    data = sample.path.read_bytes()
    plan = _load_plan(sample)
    preview = None
    if sample.kind == "binary":
        check_target(plan, sample.path, data)
        image = parse_elf(data)
        label = image.arch.name.value
        before = scanner(data)
        after_bytes = apply_patch_plan(image, plan, config.options.allow_nonexec_patch).patched_bytes
    else:
        text = slim.decode_source(data)
        lang = (slim.language_by_name(sample.language) if sample.language
                else slim.detect_language(sample.path, text))
        label = lang.name.value
        if plan is None:
            plan = slim.plan_removals(text, lang, sample.detectors, target_id=sample.path.name)
        else:
            check_target(plan, sample.path, data)
        before = scanner(data)
        after_bytes = slim.encode_source(slim.apply_removals(text, plan))
        if config.options.preview:
            preview = slim.preview_diff(text, plan, sample.path.name)
    after = scanner(after_bytes)

    dest = None
    if write:
        dest = _dest(sample, config)
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_bytes(after_bytes)

    common = dict(name=name, language_or_arch=label, malware_type=sample.malware_type,
                  original_size=len(data), original_detections=before.positives,
                  debloated_detections=after.positives)
    if sample.kind == "binary":
        row = ComparisonRow(bytes_modified=diff_bytes(data, after_bytes), **common)
    else:
        row = ComparisonRow(debloated_size=slim.apparent_size(after_bytes), **common)
    return SampleResult(row, dest, preview)


def _guarded(sample: SampleSpec, config: ExperimentConfig, scanner: Scanner, write: bool) -> SampleResult:
    try:
        return process_sample(sample, config, scanner, write)
    except (DebloatError, OSError, ValueError) as exc:
        log.warning("%s: %s: %s", sample.display_name, type(exc).__name__, exc)
        return SampleResult(ComparisonRow.failed(
            sample.display_name, type(exc).__name__, malware_type=sample.malware_type,
            error_detail=str(exc)))


def run_samples(config: ExperimentConfig, scanner: Optional[Scanner] = None, jobs: Optional[int] = None,
                write: bool = True) -> list[SampleResult]:
    if not config.samples:
        return []
    scanner = scanner or make_scanner(config)
    workers = jobs if jobs is not None else config.workers
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda s: _guarded(s, config, scanner, write), config.samples))


def run_experiment(config: ExperimentConfig, scanner: Optional[Scanner] = None,
                   jobs: Optional[int] = None, write: bool = True) -> list[ComparisonRow]:
    """One row per sample, in config order; a failing sample only fails its own row."""
    return [r.row for r in run_samples(config, scanner, jobs, write)]


def describe_plans(config: ExperimentConfig) -> list[str]:
    """Plan summaries for ``--dry-run``; nothing is scanned or written."""
    out = []
    for sample in config.samples:
        head = f"{sample.display_name} ({sample.kind})"
        try:
            plan = _load_plan(sample)
            if plan is None:
                text = slim.decode_source(sample.path.read_bytes())
                lang = (slim.language_by_name(sample.language) if sample.language
                        else slim.detect_language(sample.path, text))
                plan = slim.plan_removals(text, lang, sample.detectors)
            if isinstance(plan, PatchPlan):
                body = [f"  {r.addressing.value} {r.start:#x} +{r.length}" + (f"  {r.note}" if r.note else "")
                        for r in plan.regions]
            else:
                body = [f"  {reason}: {_ranges(lines)}" for reason, lines in plan.by_reason().items()]
            out.append("\n".join([head] + (body or ["  (empty plan)"])))
        except (DebloatError, OSError, ValueError) as exc:
            out.append(f"{head}\n  error: {type(exc).__name__}: {exc}")
    return out


def _ranges(lines: list[int]) -> str:
    parts = []
    start = prev = None
    for ln in lines:
        if prev is not None and ln == prev + 1:
            prev = ln
            continue
        if start is not None:
            parts.append(f"{start}-{prev}" if prev != start else str(start))
        start = prev = ln
    if start is not None:
        parts.append(f"{start}-{prev}" if prev != start else str(start))
    return ",".join(parts)
