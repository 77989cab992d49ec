import json

import pytest

from debloatkit.scanners import remote
from debloatkit.scanners.mock_server import MockScanService


@pytest.fixture(autouse=True)
def _isolate_limiters(monkeypatch):
    # every test gets fresh process-wide limiters
    monkeypatch.setattr(remote, "_limiters", {})


@pytest.fixture
def mock_service():
    started = []

    def factory(**script):
        svc = MockScanService(**script).start()
        started.append(svc)
        return svc

    yield factory
    for svc in started:
        svc.stop()


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc, indent=2), encoding="utf-8")
        return p
    return write


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
