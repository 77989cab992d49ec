"""Command-line entry point: ``debloatkit {run,patch,slim,scan,report}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import source_slimmer as slim
from .errors import ConfigError, DebloatError
from .nop_patcher import DEFAULT_SUFFIX, PatchPlan, patch_file, resolve_regions
from .binary_image import parse_elf
from .pipeline import ExperimentConfig, describe_plans, emit_report, read_csv_report, run_samples
from .scanners import ServiceConfig, SignatureDB, load_engine_metadata, scan_local, scan_remote

EXIT_OK = 0
EXIT_ABORT = 1
EXIT_ROW_ERRORS = 2


def _cmd_run(args) -> int:
    config = ExperimentConfig.load(args.config)
    if args.dry_run:
        for block in describe_plans(config):
            print(block)
        return EXIT_OK
    results = run_samples(config, jobs=args.jobs)
    for res in results:
        if res.preview:
            sys.stderr.write(res.preview)
        if res.row.error:
            print(f"error: {res.row.name}: {res.row.error}: {res.row.error_detail}", file=sys.stderr)
    rows = [r.row for r in results]
    fmt = args.format or config.output.format
    text = emit_report(rows, fmt)
    dest = args.output or config.output.path
    if dest:
        Path(dest).parent.mkdir(parents=True, exist_ok=True)
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_ROW_ERRORS if any(r.error for r in rows) else EXIT_OK


def _cmd_patch(args) -> int:
    plan = PatchPlan.load(args.plan)
    if args.dry_run:
        image = parse_elf(Path(args.input).read_bytes())
        for offset, length, region in resolve_regions(image, plan, args.allow_nonexec):
            note = f"  {region.note}" if region.note else ""
            print(f"offset {offset:#x} +{length} ({image.arch.name.value}){note}")
    outcome, dest = patch_file(args.input, plan, out=args.out, suffix=args.suffix,
                               allow_nonexec=args.allow_nonexec, dry_run=args.dry_run)
    verb = "would write" if args.dry_run else "wrote"
    print(f"{verb} {dest}: {outcome.regions_applied} regions, "
          f"{outcome.bytes_overwritten} bytes overwritten, {outcome.bytes_changed} bytes changed")
    return EXIT_OK


def _cmd_slim(args) -> int:
    src = Path(args.input)
    data = src.read_bytes()
    text = slim.decode_source(data)
    if args.plan:
        plan = slim.RemovalPlan.load(args.plan)
    elif args.lines:
        plan = slim.explicit_plan(args.lines, src.name, text)
    else:
        lang = slim.language_by_name(args.lang) if args.lang else slim.detect_language(src, text)
        detectors = [d.strip() for d in args.detectors.split(",") if d.strip()]
        unknown = set(detectors) - set(slim.DETECTORS)
        if unknown:
            raise ConfigError(f"unknown detectors {sorted(unknown)}; choose from {sorted(slim.DETECTORS)}")
        plan = slim.plan_removals(text, lang, detectors, target_id=src.name)
    if args.save_plan:
        plan.dump(args.save_plan)
    if args.preview:
        sys.stdout.write(slim.preview_diff(text, plan, src.name))
    if args.dry_run:
        print(json.dumps(plan.to_dict(), indent=2))
        return EXIT_OK
    out = slim.apply_removals(text, plan)
    dest = Path(args.out) if args.out else src.with_name(src.name + DEFAULT_SUFFIX)
    if dest.resolve() == src.resolve():
        raise ConfigError("refusing to overwrite the input in place")
    dest.write_bytes(slim.encode_source(out))
    print(f"wrote {dest}: removed {len(plan)} lines, {len(data)} -> {slim.apparent_size(dest)} bytes")
    return EXIT_OK


def _cmd_scan(args) -> int:
    metadata = load_engine_metadata(args.metadata) if args.metadata else {}
    if args.backend == "local":
        if not args.db:
            raise ConfigError("--db is required for the local backend")
        db = SignatureDB.load(args.db)

        def scan(data):
            return scan_local(data, db, metadata)
    else:
        if not args.base_url:
            raise ConfigError("--base-url is required for the remote backend")
        service = ServiceConfig(args.base_url, poll_budget=args.poll_budget, metadata=metadata)

        def scan(data):
            return scan_remote(data, service)

    reports = []
    for path in args.files:
        rep = scan(Path(path).read_bytes())
        reports.append({"path": path, **rep.to_dict()})
        if not args.json:
            print(f"{path}\t{rep.positives}/{rep.total_engines}\t{','.join(rep.detected_by)}")
    if args.json:
        print(json.dumps(reports, indent=2))
    return EXIT_OK


def _cmd_report(args) -> int:
    text = sys.stdin.read() if args.rows == "-" else Path(args.rows).read_text(encoding="utf-8")
    rows = read_csv_report(text)
    sys.stdout.write(emit_report(rows, args.format))
    return EXIT_ROW_ERRORS if any(r.error for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="debloatkit", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a whole experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--jobs", type=int, help="worker count (default: samples, at most 8)")
    r.add_argument("--format", choices=("csv", "markdown"))
    r.add_argument("--output", help="report path (overrides the config)")
    r.add_argument("--dry-run", action="store_true", help="print plans, do nothing else")
    r.set_defaults(func=_cmd_run)

    pt = sub.add_parser("patch", help="NOP-fill regions of an ELF binary")
    pt.add_argument("--in", dest="input", required=True)
    pt.add_argument("--plan", required=True)
    pt.add_argument("--out")
    pt.add_argument("--suffix", default=DEFAULT_SUFFIX)
    pt.add_argument("--allow-nonexec", action="store_true")
    pt.add_argument("--dry-run", action="store_true")
    pt.set_defaults(func=_cmd_patch)

    s = sub.add_parser("slim", help="remove string-feature lines from a source file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--lang", help="override language detection (Python, Shell, Perl, C, Java)")
    s.add_argument("--detectors", default=",".join(sorted(slim.DEFAULT_DETECTORS)))
    group = s.add_mutually_exclusive_group()
    group.add_argument("--plan", help="apply this removal plan instead of detecting")
    group.add_argument("--lines", help="explicit line ranges such as 26-41,45")
    s.add_argument("--out")
    s.add_argument("--save-plan")
    s.add_argument("--preview", action="store_true", help="print a unified diff of the removal")
    s.add_argument("--dry-run", action="store_true", help="print the plan without writing output")
    s.set_defaults(func=_cmd_slim)

    sc = sub.add_parser("scan", help="scan files with a detection backend")
    sc.add_argument("--backend", choices=("local", "remote"), default="local")
    sc.add_argument("--db", help="signature database (local backend)")
    sc.add_argument("--base-url", help="service base URL (remote backend)")
    sc.add_argument("--poll-budget", type=int, default=30)
    sc.add_argument("--metadata", help="engine metadata JSON")
    sc.add_argument("--json", action="store_true")
    sc.add_argument("files", nargs="+")
    sc.set_defaults(func=_cmd_scan)

    rp = sub.add_parser("report", help="re-render a CSV report")
    rp.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    rp.add_argument("rows", help="rows CSV, or - for stdin")
    rp.set_defaults(func=_cmd_report)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DebloatError, OSError, ValueError) as exc:
        print(f"debloatkit {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
