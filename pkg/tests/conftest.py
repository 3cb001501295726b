"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import pytest

_outcomes: dict[int, tuple[str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    k = marker.args[0]
    _outcomes[k] = ("PASS" if report.passed else "FAIL", report.duration)
    print(f"\ncriterion {k}: {_outcomes[k][0]} ({report.duration:.2f} s)")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        verdict, seconds = _outcomes[k]
        terminalreporter.write_line(f"criterion {k}: {verdict} ({seconds:.2f} s)")
