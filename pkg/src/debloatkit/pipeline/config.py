"""Experiment configuration (JSON)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from ..errors import ConfigError

KINDS = ("source", "binary")
BACKENDS = ("local", "remote")
FORMATS = ("csv", "markdown")
MAX_DEFAULT_JOBS = 8


@dataclass(frozen=True)
class SampleSpec:
    path: Path
    kind: str
    plan_path: Optional[Path] = None
    name: Optional[str] = None
    malware_type: Optional[str] = None
    # source samples without a plan file are planned with these detectors
    detectors: Optional[tuple[str, ...]] = None
    language: Optional[str] = None

    @property
    def display_name(self) -> str:
        return self.name or self.path.name


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: Optional[Path] = None


@dataclass(frozen=True)
class Options:
    apply_suffix: str = ".debloated"
    preview: bool = False
    allow_nonexec_patch: bool = False
    # debloated artifacts go here instead of beside their inputs
    output_dir: Optional[Path] = None


@dataclass(frozen=True)
class ExperimentConfig:
    samples: tuple[SampleSpec, ...]
    backend: str = "local"
    signature_db_path: Optional[Path] = None
    engine_metadata_path: Optional[Path] = None
    remote: dict = field(default_factory=dict)
    output: OutputSpec = OutputSpec()
    options: Options = Options()
    jobs: Optional[int] = None

    @property
    def workers(self) -> int:
        if self.jobs is not None:
            return max(1, self.jobs)
        return max(1, min(MAX_DEFAULT_JOBS, len(self.samples)))

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Union[str, os.PathLike] = ".") -> "ExperimentConfig":
        """Build and validate a config; relative paths resolve against ``base_dir``."""
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        base = Path(base_dir)

        def resolve(value: Any, what: str) -> Optional[Path]:
            if value is None:
                return None
            if not isinstance(value, str) or not value:
                raise ConfigError(f"{what} must be a non-empty string")
            p = Path(value)
            return p if p.is_absolute() else base / p

        samples = []
        for i, entry in enumerate(doc.get("samples", [])):
            if not isinstance(entry, dict) or "path" not in entry:
                raise ConfigError(f"samples[{i}] needs a path")
            kind = entry.get("kind")
            if kind not in KINDS:
                raise ConfigError(f"samples[{i}].kind must be one of {KINDS}, got {kind!r}")
            path = resolve(entry["path"], f"samples[{i}].path")
            if not path.is_file():
                raise ConfigError(f"samples[{i}]: {path} does not exist")
            plan = resolve(entry.get("plan_path"), f"samples[{i}].plan_path")
            detectors = entry.get("detectors")
            if plan is None and (kind == "binary" or detectors is None):
                raise ConfigError(f"samples[{i}] needs a plan_path" + (" or detectors" if kind == "source" else ""))
            if plan is not None and plan.is_file():
                _check_plan_kind(plan, kind, i)
            samples.append(SampleSpec(
                path=path, kind=kind, plan_path=plan, name=entry.get("name"),
                malware_type=entry.get("type"),
                detectors=tuple(detectors) if detectors is not None else None,
                language=entry.get("language"),
            ))

        backend = doc.get("backend", "local")
        if backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {backend!r}")
        db = resolve(doc.get("signature_db_path"), "signature_db_path")
        if backend == "local" and samples:
            if db is None:
                raise ConfigError("the local backend needs signature_db_path")
            if not db.is_file():
                raise ConfigError(f"signature database {db} does not exist")
        remote = doc.get("remote", {})
        if backend == "remote" and not (isinstance(remote, dict) and remote.get("base_url")):
            raise ConfigError("the remote backend needs remote.base_url")

        out = doc.get("output", {}) or {}
        fmt = out.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}, got {fmt!r}")
        opts = doc.get("options", {}) or {}
        suffix = opts.get("apply_suffix", ".debloated")
        if not isinstance(suffix, str) or not suffix:
            raise ConfigError("options.apply_suffix must be a non-empty string")
        jobs = doc.get("jobs")
        if jobs is not None and (not isinstance(jobs, int) or jobs < 1):
            raise ConfigError("jobs must be a positive integer")

        return cls(
            samples=tuple(samples),
            backend=backend,
            signature_db_path=db,
            engine_metadata_path=resolve(doc.get("engine_metadata_path"), "engine_metadata_path"),
            remote=dict(remote),
            output=OutputSpec(fmt, resolve(out.get("path"), "output.path")),
            options=Options(
                apply_suffix=suffix,
                preview=bool(opts.get("preview", False)),
                allow_nonexec_patch=bool(opts.get("allow_nonexec_patch", False)),
                output_dir=resolve(opts.get("output_dir"), "options.output_dir"),
            ),
            jobs=jobs,
        )

    @classmethod
    def load(cls, path: Union[str, os.PathLike]) -> "ExperimentConfig":
        p = Path(path)
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file {p} not found") from None
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{p}: {exc}") from exc
        return cls.from_dict(doc, p.parent)


def _check_plan_kind(plan: Path, kind: str, i: int) -> None:
    try:
        doc = json.loads(plan.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError):
        return  # reported per sample when the plan is loaded
    if not isinstance(doc, dict):
        return
    if kind == "binary" and "lines" in doc and "regions" not in doc:
        raise ConfigError(f"samples[{i}]: {plan} is a removal plan but the sample is binary")
    if kind == "source" and "regions" in doc and "lines" not in doc:
        raise ConfigError(f"samples[{i}]: {plan} is a patch plan but the sample is source")
