import time

import pytest

from fekete.feketesys import build_system
from fekete.groebner import Budget, buchberger

# criterion number -> (title, outcome, detail)
_CRITERIA: dict = {}
_DETAILS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the acceptance summary."""
    marker = request.node.get_closest_marker("criterion")

    def record(text):
        if marker is not None:
            _DETAILS.setdefault(marker.args[0], []).append(str(text))

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    num, title = marker.args
    prev = _CRITERIA.get(num, (title, "PASS"))[1]
    status = "FAIL" if rep.failed or prev == "FAIL" else "PASS"
    _CRITERIA[num] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status = _CRITERIA[num]
        extra = "; ".join(_DETAILS.get(num, []))
        tr.write_line(f"[{status}] criterion {num:2d}: {title}" + (f"  ({extra})" if extra else ""))


@pytest.fixture(scope="session")
def basis_n4():
    t = time.perf_counter()
    gb = buchberger(build_system(4).generators, budget=Budget(seconds=60))
    return gb, time.perf_counter() - t


@pytest.fixture(scope="session")
def basis_n5():
    """The rational n=5 grevlex basis, computed once per session (several minutes)."""
    t = time.perf_counter()
    gb = buchberger(build_system(5).generators, budget=Budget(seconds=1800))
    return gb, time.perf_counter() - t
