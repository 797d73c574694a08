"""Collects outcomes of tests marked ``criterion(n, title)`` and prints one line per criterion."""

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
    entry = _OUTCOMES.setdefault(number, {"title": title, "passed": 0, "failed": 0, "skipped": 0})
    if report.when == "call" or report.outcome != "passed":
        if report.passed and report.when == "call":
            entry["passed"] += 1
        elif report.failed:
            entry["failed"] += 1
        elif report.skipped:
            entry["skipped"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        e = _OUTCOMES[number]
        verdict = "PASS" if e["failed"] == 0 and e["passed"] > 0 else "FAIL"
        extra = f", {e['skipped']} skipped" if e["skipped"] else ""
        terminalreporter.write_line(
            f"criterion {number:2d} {verdict}: {e['title']} ({e['passed']} passed, {e['failed']} failed{extra})")
