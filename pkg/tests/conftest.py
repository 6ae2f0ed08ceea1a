import random

import pytest
from gmpy2 import mpq
from hypothesis import settings

from germforge.germ import MapGerm
from germforge.series import Series2

settings.register_profile("germforge", deadline=None)
settings.load_profile("germforge")

# phi of the normal form (xi + t, phi) for each finite class
NORMAL_FORMS = {
    "I": "t^2",
    "II": "t^2*xi",
    "S1,1": "t^2*(t+xi) + t^4 + t^5",
    "S1,2": "t^2*(t+xi) + t^4 + t^7",
    "S1,3": "t^2*(t+xi) + t^4 + t^9",
    "T1": "t^3 + t^2*(t+xi)^2",
    "T2": "t^3 + t^2*(t+xi)^3",
    "T3": "t^3 + t^2*(t+xi)^4",
    "S2,2": "t^2*(t+xi) + t^5 + t^6",
    "S2,3+": "t^2*(t+xi) + t^5 + t^9",
    "S2,3-": "t^2*(t+xi) + t^5 - t^9",
    "S2,4": "t^2*(t+xi) + t^5",
}


def _rnd_poly(rng, lo, hi, tr, density=0.5):
    terms = {}
    for d in range(lo, hi + 1):
        for i in range(d + 1):
            if rng.random() < density:
                terms[(i, d - i)] = mpq(rng.randint(-3, 3), rng.randint(1, 3))
    return Series2(terms, tr)


def random_conjugate(f: MapGerm, rng: random.Random) -> MapGerm:
    """``phi o f o psi`` for random polynomial diffeomorphism jets.

    The source change ``(Xi(xi), t * U(xi, t))`` keeps the support ``t = 0``;
    the target change is an arbitrary invertible polynomial jet.
    """
    tr = f.trunc
    xi, t = Series2.xi(tr), Series2.t(tr)
    a = mpq(rng.choice([1, 2, -1, 3, -2]), rng.choice([1, 2]))
    big_xi = xi.scale(a) + Series2({(k, 0): mpq(rng.randint(-2, 2), rng.randint(1, 3)) for k in range(2, 5)}, tr)
    b = mpq(rng.choice([1, -1, 2, -3]), rng.choice([1, 2]))
    big_t = t * (Series2.const(b, tr) + _rnd_poly(rng, 1, 3, tr))
    g = f.compose_right(big_xi, big_t)
    c = mpq(rng.choice([1, 2, -1]))
    d = mpq(rng.choice([1, 3, -2]), 2)
    A = (xi.scale(c) + t.scale(mpq(rng.randint(-2, 2)))
         + _rnd_poly(rng, 2, 3, tr, 0.4))
    B = (t.scale(d) + _rnd_poly(rng, 2, 3, tr, 0.4))
    return g.compose_left(A, B)


@pytest.fixture
def rng():
    return random.Random(20240611)


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _RESULTS[n] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title = _RESULTS[n]
        terminalreporter.write_line(f"{status}  criterion {n:2d}: {title}")
