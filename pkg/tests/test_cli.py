import json
import subprocess
import sys

import pytest

from debloatkit.binary_image import ArchName
from debloatkit.cli import main
from debloatkit.nop_patcher import Addressing, PatchPlan, PatchRegion
from corpus import build_corpus
from elffab import build_elf


@pytest.fixture
def corpus(tmp_path):
    return build_corpus(tmp_path / "c")


def test_run_writes_report(corpus, capsys):
    assert main(["run", "--config", str(corpus.config_path)]) == 0
    text = (corpus.config_path.parent / "report.csv").read_text()
    assert text.splitlines()[-1] == "reduced_fraction,80"


def test_run_to_stdout_as_markdown(corpus, capsys, tmp_path):
    out = tmp_path / "r.md"
    assert main(["run", "--config", str(corpus.config_path), "--format", "markdown",
                 "--output", str(out), "--jobs", "2"]) == 0
    assert out.read_text().splitlines()[-1] == "reduced_fraction: 80"


def test_run_row_error_exit_code(corpus, capsys):
    (corpus.config_path.parent / "bin6.x86_64.plan.json").unlink()
    assert main(["run", "--config", str(corpus.config_path)]) == 2
    assert "PlanNotFound" in capsys.readouterr().err


def test_run_bad_config_aborts(tmp_path, capsys):
    cfg = tmp_path / "x.json"
    cfg.write_text('{"samples": [{"path": "nope.py", "kind": "source"}]}')
    assert main(["run", "--config", str(cfg)]) == 1
    assert "ConfigError" in capsys.readouterr().err


def test_run_dry_run_writes_nothing(corpus, capsys):
    before = sorted(p.name for p in corpus.config_path.parent.iterdir())
    assert main(["run", "--config", str(corpus.config_path), "--dry-run"]) == 0
    assert "banner_print" in capsys.readouterr().out
    assert sorted(p.name for p in corpus.config_path.parent.iterdir()) == before


def _binary(tmp_path):
    fab = build_elf(ArchName.X86_64, text=b"\xcc" * 32)
    path = tmp_path / "prog"
    path.write_bytes(fab.raw)
    plan = tmp_path / "prog.plan.json"
    PatchPlan("prog", (PatchRegion(Addressing.VIRTUAL, fab.text_vaddr + 4, 8, "demo"),)).dump(plan)
    return fab, path, plan


def test_patch(tmp_path, capsys):
    fab, path, plan = _binary(tmp_path)
    assert main(["patch", "--in", str(path), "--plan", str(plan)]) == 0
    out = (tmp_path / "prog.debloated").read_bytes()
    at = fab.text_offset + 4
    assert out[at:at + 8] == b"\x90" * 8
    assert "8 bytes changed" in capsys.readouterr().out
    assert path.read_bytes() == fab.raw


def test_patch_dry_run(tmp_path, capsys):
    fab, path, plan = _binary(tmp_path)
    assert main(["patch", "--in", str(path), "--plan", str(plan), "--dry-run", "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert f"offset {fab.text_offset + 4:#x} +8 (x86_64)" in out and "would write" in out
    assert not (tmp_path / "o").exists()


def test_patch_errors_abort(tmp_path, capsys):
    _, path, _ = _binary(tmp_path)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"regions": [{"addressing": "virtual", "start": 1, "length": 4}]}))
    assert main(["patch", "--in", str(path), "--plan", str(bad)]) == 1
    assert "UnmappedAddress" in capsys.readouterr().err


SRC = '#!/bin/sh\n# banner\necho "==== tool ===="\nnc -l -p "$1"\n'


def test_slim_default(tmp_path, capsys):
    src = tmp_path / "t.sh"
    src.write_text(SRC)
    assert main(["slim", "--in", str(src), "--detectors", "comment,banner_print"]) == 0
    assert (tmp_path / "t.sh.debloated").read_text() == '#!/bin/sh\nnc -l -p "$1"\n'


def test_slim_preview_and_dry_run(tmp_path, capsys):
    src = tmp_path / "t.sh"
    src.write_text(SRC)
    assert main(["slim", "--in", str(src), "--detectors", "banner_print", "--preview", "--dry-run"]) == 0
    out = capsys.readouterr().out
    assert '-echo "==== tool ===="' in out
    assert '"lines": [' in out
    assert not (tmp_path / "t.sh.debloated").exists()


def test_slim_explicit_lines_and_plan_roundtrip(tmp_path, capsys):
    src = tmp_path / "t.sh"
    src.write_text(SRC)
    saved = tmp_path / "p.json"
    assert main(["slim", "--in", str(src), "--lines", "2-3", "--out", str(tmp_path / "a"),
                 "--save-plan", str(saved)]) == 0
    assert main(["slim", "--in", str(src), "--plan", str(saved), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a").read_text() == (tmp_path / "b").read_text() == '#!/bin/sh\nnc -l -p "$1"\n'


def test_slim_rejects_unknown_detector_and_in_place(tmp_path, capsys):
    src = tmp_path / "t.sh"
    src.write_text(SRC)
    assert main(["slim", "--in", str(src), "--detectors", "nonsense"]) == 1
    assert main(["slim", "--in", str(src), "--out", str(src)]) == 1
    assert src.read_text() == SRC


def test_scan_local(tmp_path, capsys):
    db = tmp_path / "db.json"
    db.write_text(json.dumps({"signatures": [{"id": "a", "engine": "E", "pattern": "tool"}], "engines": ["Q"]}))
    src = tmp_path / "t.sh"
    src.write_text(SRC)
    assert main(["scan", "--db", str(db), str(src)]) == 0
    assert capsys.readouterr().out.strip() == f"{src}\t1/2\tE"
    assert main(["scan", "--db", str(db), "--json", str(src)]) == 0
    assert json.loads(capsys.readouterr().out)[0]["positives"] == 1


def test_scan_remote_against_mock(tmp_path, capsys, mock_service, monkeypatch):
    svc = mock_service(detected=2, engines=5)
    monkeypatch.setenv("SCANHUB_API_KEY", "test-key")
    src = tmp_path / "f"
    src.write_bytes(b"abc")
    assert main(["scan", "--backend", "remote", "--base-url", svc.base_url, str(src)]) == 0
    assert "\t2/5\t" in capsys.readouterr().out


def test_scan_remote_needs_key(tmp_path, capsys, mock_service, monkeypatch):
    svc = mock_service()
    monkeypatch.delenv("SCANHUB_API_KEY", raising=False)
    src = tmp_path / "f"
    src.write_bytes(b"abc")
    assert main(["scan", "--backend", "remote", "--base-url", svc.base_url, str(src)]) == 1
    assert "AuthError" in capsys.readouterr().err


def test_report_rerender(corpus, capsys):
    main(["run", "--config", str(corpus.config_path)])
    capsys.readouterr()
    assert main(["report", "--format", "markdown", str(corpus.config_path.parent / "report.csv")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("| name |") and out.rstrip().endswith("reduced_fraction: 80")


def test_module_help():
    res = subprocess.run([sys.executable, "-m", "debloatkit", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("run", "patch", "slim", "scan", "report"):
        assert cmd in res.stdout
