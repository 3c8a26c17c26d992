"""Prints one verdict line per acceptance check in the terminal summary."""

import pytest

_outcomes = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call":
        if report.skipped:
            _outcomes[name] = "SKIP"
        else:
            _outcomes[name] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and (report.failed or report.skipped):
        _outcomes[name] = "SKIP" if report.skipped else "FAIL"


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    try:
        from test_acceptance import CHECKS
    except ImportError:
        return
    terminalreporter.write_sep("-", "acceptance checks")
    for name, (num, label) in sorted(CHECKS.items(), key=lambda kv: kv[1][0]):
        outcome = _outcomes.get(name)
        if outcome is None:
            continue
        terminalreporter.write_line(f"[{num}/{len(CHECKS)}] {outcome} {label}")
