"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if report.failed:
        msg = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
        detail = f"{detail}; {msg}" if detail else msg
    _results[number] = (report.passed, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        passed, title, detail = _results[number]
        tag = "PASS" if passed else "FAIL"
        line = f"[{tag}] criterion {number}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
