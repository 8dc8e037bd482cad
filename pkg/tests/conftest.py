import json
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

GOLDEN = Path(__file__).parent / "golden" / "report_all.json"


@dataclass(frozen=True)
class CliRun:
    returncode: int
    stdout: str = field(repr=False)
    stderr: str = field(repr=False)
    report: dict | None = field(repr=False)
    seconds: float


def run_cli(*args: str, out: Path | None = None) -> CliRun:
    cmd = [sys.executable, "-m", "hyperhomog.cli", *args]
    if out is not None:
        cmd += ["--out", str(out)]
    start = time.perf_counter()
    proc = subprocess.run(cmd, capture_output=True, text=True)
    seconds = time.perf_counter() - start
    report = json.loads(out.read_text()) if out is not None and out.exists() else None
    return CliRun(proc.returncode, proc.stdout, proc.stderr, report, seconds)


@pytest.fixture(scope="session")
def verify_all(tmp_path_factory) -> CliRun:
    """One end-to-end ``verify --suite all`` run shared by every test that needs it."""
    out = tmp_path_factory.mktemp("verify") / "report.json"
    return run_cli("verify", "--suite", "all", out=out)


@pytest.fixture(scope="session")
def golden() -> dict:
    return json.loads(GOLDEN.read_text())


def strip_timing(report: dict) -> dict:
    report = json.loads(json.dumps(report))
    for r in report["results"]:
        r.pop("elapsed_ms", None)
    return report


# --- acceptance summary ---------------------------------------------------------------

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            entry = _criteria.setdefault(number, {"title": title, "outcomes": {}})
            entry["outcomes"][item.nodeid] = None


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid in entry["outcomes"]:
            prev = entry["outcomes"][report.nodeid]
            if report.when == "call" or report.failed or report.skipped:
                if prev != "failed":
                    entry["outcomes"][report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = list(entry["outcomes"].values())
        if any(o is None for o in outcomes):
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status:7} {entry['title']}")
