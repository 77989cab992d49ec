"""A desk-scale corpus with planted signatures and a matching experiment config.

Every fixture i carries a unique marker that three engines detect.  Covered
fixtures keep their marker only where the plan removes it.  Uncovered ones
repeat it in code the plan leaves alone, so detections stay the same.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from debloatkit.binary_image import ArchName
from debloatkit.nop_patcher import Addressing, PatchPlan, PatchRegion
from elffab import build_elf

ENGINES = ("EngineA", "EngineB", "EngineC")
QUIET = ("EngineQuiet",)


def marker(i: int) -> str:
    return f"SIG{i:02d}MARK"


def _python(m: str, covered: bool) -> str:
    extra = "" if covered else f'    tag = "{m}" + sys.argv[0]\n'
    return (
        "import sys\n\n"
        "def banner():\n"
        f'    print("=== {m} toolkit ===")\n\n'
        "def main():\n"
        f"{extra}"
        "    banner()\n"
        "    return len(sys.argv)\n\n"
        "main()\n"
    )


def _shell(m: str, covered: bool) -> str:
    extra = "" if covered else f'TAG="{m}-$1"\n'
    return f'#!/bin/sh\n# {m} helper\necho "{m} shell"\n{extra}nc -l -p "$1"\n'


def _perl(m: str, covered: bool) -> str:
    extra = "" if covered else f'my $tag = "{m}" . $ARGV[0];\n'
    return f'#!/usr/bin/perl\nuse strict;\nprint "{m} bot\\n";\n{extra}my $h = shift;\n'


def _c(m: str, covered: bool) -> str:
    extra = "" if covered else f'    const char *tag = "{m}";\n'
    return (
        "#include <stdio.h>\n"
        f"/* {m} worm */\n"
        "int main(int argc, char **argv) {\n"
        f"{extra}"
        f'    puts("{m} says hi");\n'
        "    return argc;\n"
        "}\n"
    )


def _java(m: str, covered: bool) -> str:
    extra = "" if covered else f'        String tag = "{m}" + args[0];\n'
    return (
        "public class Killer {\n"
        "    public static void main(String[] args) {\n"
        f"{extra}"
        f'        System.out.println("{m} applet");\n'
        "    }\n"
        "}\n"
    )


SOURCES = [("py", _python), ("sh", _shell), ("pl", _perl), ("c", _c), ("java", _java)]
BINARIES = [ArchName.X86_32, ArchName.X86_64, ArchName.MIPS32, ArchName.ARM32, ArchName.M68K32]


@dataclass
class Corpus:
    config_path: Path
    signature_db: Path
    names: list[str]
    covered: list[bool]


def build_corpus(root: Path, uncovered: tuple[int, ...] = (4, 9), output_format: str = "csv") -> Corpus:
    root.mkdir(parents=True, exist_ok=True)
    samples, names, covered_flags, sigs = [], [], [], []
    for i in range(10):
        m = marker(i)
        covered = i not in uncovered
        for e in ENGINES:
            sigs.append({"id": f"{m}-{e}", "engine": e, "pattern": m})
        if i < 5:
            ext, make = SOURCES[i]
            name = f"src{i}.{ext}" if ext != "java" else "Killer.java"
            (root / name).write_text(make(m, covered))
            samples.append({"path": name, "kind": "source", "type": "Synthetic",
                            "detectors": ["comment", "banner_print", "print_only_function"]})
        else:
            arch = BINARIES[i - 5]
            mb = m.encode()
            width = {ArchName.MIPS32: 4, ArchName.ARM32: 4, ArchName.M68K32: 2}.get(arch, 1)
            pad = bytes(range(0x20, 0x20 + 16))
            text = pad + mb + pad
            data = (mb if not covered else b"clean") + b"\x00"
            fab = build_elf(arch, text=text, data=data)
            name = f"bin{i}.{arch.value}"
            (root / name).write_bytes(fab.raw)
            start = fab.text_vaddr + len(pad)
            length = -(-len(mb) // width) * width
            plan = PatchPlan(name, (PatchRegion(Addressing.VIRTUAL, start, length, "planted marker"),))
            plan.dump(root / f"{name}.plan.json")
            samples.append({"path": name, "kind": "binary", "type": "Synthetic",
                            "plan_path": f"{name}.plan.json"})
        names.append(samples[-1]["path"])
        covered_flags.append(covered)

    db = root / "signatures.json"
    db.write_text(json.dumps({"signatures": sigs, "engines": list(QUIET)}, indent=2))
    cfg = {
        "samples": samples,
        "backend": "local",
        "signature_db_path": "signatures.json",
        "output": {"format": output_format, "path": f"report.{'csv' if output_format == 'csv' else 'md'}"},
        "options": {"apply_suffix": ".debloated"},
    }
    cfg_path = root / "experiment.json"
    cfg_path.write_text(json.dumps(cfg, indent=2))
    return Corpus(cfg_path, db, names, covered_flags)
