import pytest

from matchbox.model import Economy

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    label = getattr(report, "criterion", None)
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        ok = _CRITERIA.get(label, True) and report.outcome == "passed"
        _CRITERIA[label] = ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA):
        terminalreporter.write_line(f"{'PASS' if _CRITERIA[label] else 'FAIL'}  {label}")


@pytest.fixture
def estar():
    """Capital-intensive investment sector example with theta = 5/4, zeta = -2."""
    def make(delta=0.6, d=0.5):
        return Economy(2 / 3, 4 / 3, 1.0, d, delta)

    return make
