"""Shared pytest wiring: one summary line per acceptance criterion."""

import re

_ACCEPTANCE = {}

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)([a-z]?)_(\w+)")


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = _CRITERION.search(report.nodeid)
    if m:
        num, sub, name = int(m.group(1)), m.group(2), m.group(3)
        _ACCEPTANCE[(num, sub)] = (name, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, sub), (name, outcome) in sorted(_ACCEPTANCE.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}{sub or ' '}  {verdict}  {name}")
