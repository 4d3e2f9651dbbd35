"""Shared pytest config: prints one summary line per acceptance check."""

import pytest

_ACCEPTANCE_FILE = "test_acceptance.py"
_acceptance_reports: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if _ACCEPTANCE_FILE not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        outcome = "PASS" if report.passed else (
            "SKIP" if report.skipped else "FAIL")
        _acceptance_reports.append((report.nodeid, outcome))


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _acceptance_reports:
        return
    terminalreporter.section("acceptance checks")
    for nodeid, outcome in _acceptance_reports:
        name = nodeid.split("::")[-1]
        label = name.removeprefix("test_").replace("_", " ")
        terminalreporter.write_line(f"{outcome}  {label}")
