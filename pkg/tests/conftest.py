import random
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from pfq.field_tower import make_tower
from pfq.quad_core import CoeffVec

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@lru_cache(maxsize=None)
def tower(p, k, ell):
    return make_tower(p, k, ell)


def random_c(t, rng):
    while True:
        c = CoeffVec(t, [t.elt(rng.randrange(t.q2)) for _ in range(4)])
        if not c.is_zero():
            return c


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def f9():
    return tower(3, 1, 1)


@pytest.fixture
def f729():
    return tower(3, 3, 1)


# one pass/fail line per acceptance criterion, printed after the run
_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _criteria[n] = (rep.passed, rep.duration, mark.args[1])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, dt, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title} ({dt:.1f}s)")
