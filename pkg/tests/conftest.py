import pytest

_VERDICTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and report.passed:
        return
    entry = _VERDICTS.setdefault(marker.args[0], {"title": marker.args[1], "ok": True})
    if report.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_VERDICTS):
        entry = _VERDICTS[key]
        verdict = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {key:2d}: {entry['title']}")
