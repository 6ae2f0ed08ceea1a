import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from germforge.errors import ContractViolation
from germforge.series import (Q, Series2, Trunc, Weighting, lower_left_hull, newton_support,
                              render, default_truncation)

N = 8
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.tuples(st.integers(0, N), st.integers(0, N)).filter(lambda e: sum(e) <= N)


@st.composite
def series(draw, const=True, size=8):
    terms = draw(st.dictionaries(exps, coeffs, max_size=size))
    if not const:
        terms.pop((0, 0), None)
    return Series2(terms, N)


X, T = sympy.symbols("xi t")


def to_sympy(s: Series2):
    return sum((sympy.Rational(int(c.numerator), int(c.denominator)) * X ** i * T ** j
                for (i, j), c in s.terms.items()), sympy.Integer(0))


def truncate_sympy(expr, n=N):
    p = sympy.Poly(sympy.expand(expr), X, T)
    return sum((c * X ** i * T ** j for (i, j), c in p.terms() if i + j <= n), sympy.Integer(0))


@given(series(), series(), series())
@settings(deadline=None)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Series2.zero(N)


@given(series(), series())
@settings(deadline=None)
def test_product_matches_sympy(a, b):
    assert sympy.expand(to_sympy(a * b) - truncate_sympy(to_sympy(a) * to_sympy(b))) == 0


@given(series(size=5), series(const=False, size=3), series(const=False, size=3))
@settings(max_examples=25, deadline=None)
def test_substitution_matches_sympy(a, u, v):
    got = to_sympy(a.substitute(u, v))
    want = truncate_sympy(to_sympy(a).subs({X: to_sympy(u), T: to_sympy(v)}, simultaneous=True))
    assert sympy.expand(got - want) == 0


@given(series())
@settings(deadline=None)
def test_inverse_of_units(a):
    if not a.constant_term():
        a = a + 1
    assert a * a.inverse() == Series2.const(1, N)


def test_inverse_rejects_nonunit():
    with pytest.raises(ContractViolation):
        Series2.t(N).inverse()


def test_truncation_drops_high_terms():
    s = Series2({(0, 9): 1, (2, 3): 4}, 8)
    assert s.terms == {(2, 3): 4}
    assert (Series2.t(4) ** 5).is_zero()


def test_weighted_truncation_and_order():
    w = Weighting(2, 1)
    s = Series2({(1, 2): 1, (0, 4): 1, (0, 5): 3}, Trunc(4, w))
    assert s.order(w) == 4
    assert (0, 5) not in s.terms
    assert s.graded_part(w, 4) == s


def test_weighting_must_be_coprime():
    with pytest.raises(ContractViolation):
        Weighting(2, 4)


def test_diff_lowers_bound():
    s = Series2({(2, 3): 1}, 8)
    d = s.diff("t")
    assert d.coeff(2, 2) == 3
    assert d.trunc.bound == 7


def test_mismatched_bounds_rejected():
    with pytest.raises(ContractViolation):
        Series2.t(5) + Series2.t(6)


def test_divide_by_t():
    s = Series2({(1, 2): 2, (0, 3): 1}, 8)
    assert s.divisible_by_t(2)
    assert s.divide_by_t(2) == Series2({(1, 0): 2, (0, 1): 1}, 6)


def test_render_is_stable():
    s = Series2({(0, 3): 1, (1, 2): mpq(-1, 2), (0, 2): 1}, 8)
    assert render(s) == "t^2 - 1/2*t^2*xi + t^3"
    assert render(Series2.zero(3)) == "0"


def test_coefficient_coercion():
    assert Q("3/4") == mpq(3, 4)
    with pytest.raises(TypeError):
        Q(True)


def test_newton_hull():
    hull = lower_left_hull([(0, 3), (2, 0), (1, 1), (3, 3)])
    assert hull == ((0, 3), (1, 1), (2, 0))
    assert newton_support(Series2({(0, 2): 1, (3, 0): 1, (2, 2): 1}, 8)).vertices == ((0, 2), (3, 0))


def test_default_truncation_env(monkeypatch):
    monkeypatch.setenv("GERMFORGE_MAX_JET", "11")
    assert default_truncation() == 11
    monkeypatch.setenv("GERMFORGE_MAX_JET", "two")
    with pytest.raises(ContractViolation):
        default_truncation()
    monkeypatch.delenv("GERMFORGE_MAX_JET")
    assert default_truncation() == 16
