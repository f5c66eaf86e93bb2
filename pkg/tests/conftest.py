from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_results: dict[str, dict] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = report.user_properties and dict(report.user_properties).get("criterion")
    if not crit:
        return
    cid, title = crit
    entry = _results.setdefault(cid, {"title": title, "failed": [], "count": 0})
    entry["count"] += 1
    if report.outcome != "passed":
        entry["failed"].append(report.nodeid.split("::")[-1])


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", (str(m.args[0]), m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_results, key=lambda c: int(c)):
        r = _results[cid]
        status = "PASS" if not r["failed"] else "FAIL"
        line = f"criterion {cid:>2} {status}  {r['title']}"
        if r["failed"]:
            line += f"  (failing: {', '.join(r['failed'])})"
        terminalreporter.write_line(line)
