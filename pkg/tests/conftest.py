from __future__ import annotations

import pytest

_OUTCOMES: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _OUTCOMES.setdefault(number, {"title": title, "passed": True, "count": 0})
    if report.when == "call":
        entry["count"] += 1
    if report.failed or (report.when == "call" and report.skipped):
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        entry = _OUTCOMES[number]
        status = "PASS" if entry["passed"] and entry["count"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}  {status}  {entry['title']} ({entry['count']} checks)")
