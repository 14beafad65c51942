"""Per-criterion pass/fail summary for the acceptance suite.

Tests tagged ``@pytest.mark.criterion(k)`` are grouped by ``k``; a criterion
passes when all of its tests pass. Measurements recorded with the
``measure`` fixture are printed next to the verdict.
"""

import pytest

_results: dict = {}
_measured: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.fixture
def measure(request):
    marker = request.node.get_closest_marker("criterion")
    key = marker.args[0] if marker else None

    def record(text):
        _measured.setdefault(key, []).append(str(text))

    return record


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.failed or report.skipped):
        return
    key = getattr(report, "_criterion", None)
    if key is None:
        return
    ok = report.passed if report.when == "call" else False
    _results[key] = _results.get(key, True) and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result()._criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        verdict = "PASS" if _results[k] else "FAIL"
        detail = "; ".join(_measured.get(k, []))
        terminalreporter.write_line(f"criterion {k:>2}: {verdict}" + (f"  ({detail})" if detail else ""))
