import pytest

from tacio.competency import CQ_IDS, FIXTURES, load_fixture


@pytest.fixture(params=sorted(FIXTURES.values()))
def fixture_name(request):
    return request.param


@pytest.fixture
def email():
    return load_fixture("cq1a_email")


@pytest.fixture
def traffic():
    return load_fixture("cq2a_traffic")


@pytest.fixture
def fanout():
    return load_fixture("cq3a_fanout")


import time

_SESSION_START = time.perf_counter()
_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")
    config.addinivalue_line("markers", "runs_last: move to the end of the run")


def pytest_collection_modifyitems(session, config, items):
    # the suite-duration check has to observe every other test
    last = [i for i in items if i.get_closest_marker("runs_last")]
    items[:] = [i for i in items if i not in last] + last


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    passed = call.excinfo is None
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, passed = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {title}")


def session_elapsed() -> float:
    return time.perf_counter() - _SESSION_START
