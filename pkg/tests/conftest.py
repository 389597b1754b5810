"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

import pytest

_outcomes: dict = {}
_titles: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _titles[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _titles:
        return
    if report.when == "call" or report.failed:
        prev = _outcomes.get(report.nodeid, "passed")
        _outcomes[report.nodeid] = "failed" if report.failed or prev == "failed" else report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    by_number: dict = {}
    for nodeid, (number, title) in _titles.items():
        outcomes, _ = by_number.setdefault(number, ([], title))
        if nodeid in _outcomes:
            outcomes.append(_outcomes[nodeid])
    terminalreporter.section("acceptance criteria")
    for number in sorted(by_number):
        outcomes, title = by_number[number]
        if not outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
