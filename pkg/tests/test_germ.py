import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_conjugate
from germforge.errors import (ContractViolation, NotImmersedFiber, NotTangentialFamily,
                              SingularSupport, TangencyViolated)
from germforge.germ import (MapGerm, PrenormalForm, criminant_equation, family_from_graph,
                            invert_univariate, jacobian_det, prenormal_from_text, solve_fiber,
                            to_prenormal, validate_tangential)
from germforge.parser import parse_map, parse_series
from germforge.series import Series2


def test_prenormal_invariants():
    pf = prenormal_from_text("t^3 + t^2*(t+xi)^2", 10)
    assert pf.alpha == 1
    assert pf.kcoef(0) == 0 and pf.kcoef(1) == 0 and pf.kcoef(2) == 1
    assert pf.kcoef(50) == 0


def test_prenormal_requires_t_squared():
    with pytest.raises(ContractViolation):
        PrenormalForm(parse_series("t*xi + t^3", 8))


@pytest.mark.parametrize("text, exc", [
    ("t ; t^2", SingularSupport),
    ("xi + t^2 ; t^3", NotImmersedFiber),
    ("xi + t ; t", TangencyViolated),
    ("xi ; t^2", TangencyViolated),
    ("xi + t ; t^2 + t*xi^3", TangencyViolated),
])
def test_axiom_failures(text, exc):
    with pytest.raises(exc) as ei:
        validate_tangential(parse_map(text, 10))
    assert isinstance(ei.value, NotTangentialFamily)
    assert ei.value.code == 3


def test_tangency_order_reported():
    with pytest.raises(TangencyViolated) as ei:
        validate_tangential(parse_map("xi + t ; t^2 + t*xi^3", 10))
    assert ei.value.order == 3


def test_normal_form_is_fixed_point():
    f = parse_map("xi + t ; t^2*(t+xi) + t^4 + t^7", 12)
    assert to_prenormal(f).phi == f.q


def test_general_family_reaches_prenormal_shape(rng):
    f = parse_map("xi + t ; t^2*(t+xi) + t^4 + t^7", 12)
    for _ in range(5):
        pf = to_prenormal(random_conjugate(f, rng))
        assert pf.phi.divisible_by_t(2)
        assert pf.as_map().p == Series2({(1, 0): 1, (0, 1): 1}, 12)


def test_graph_presentation_roundtrip():
    psi = parse_series("t^4 + t^2*xi + 3*t^5*xi", 12)
    f = family_from_graph(psi)
    pf = to_prenormal(f)
    assert pf.graph_phi() == psi


def test_criminant_is_jacobian():
    pf = prenormal_from_text("t^2*xi + 2*t^3*xi^2 + t^5", 10)
    g, h = criminant_equation(pf)
    assert g.same_terms(jacobian_det(pf.as_map()))
    assert g.same_terms(Series2.t(g.trunc) * h.retruncate(g.trunc))


def test_ii_criminant():
    g, h = criminant_equation(prenormal_from_text("t^2*xi", 10))
    assert h.terms == {(1, 0): 2, (0, 1): -1}


coef = st.integers(-3, 3).map(mpq)


@given(st.dictionaries(st.tuples(st.integers(1, 4), st.integers(0, 0)), coef, max_size=3), coef.filter(bool))
@settings(max_examples=30)
def test_univariate_inverse(extra, lead):
    tr = 9
    x = Series2({(1, 0): lead, **{(i + 1, 0): c for (i, _), c in extra.items()}}, tr)
    a = invert_univariate(x)
    assert x.substitute(a, Series2.zero(tr)) == Series2.xi(tr)


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(1, 3)), coef, max_size=4))
@settings(max_examples=30)
def test_solve_fiber(extra):
    tr = 8
    r = Series2({(0, 1): 1, **{k: v for k, v in extra.items() if k != (0, 1)}}, tr)
    b = solve_fiber(r)
    assert r.substitute(Series2.xi(tr), b) == Series2.t(tr)


def test_map_text():
    f = MapGerm(parse_series("xi + t", 6), parse_series("t^2*xi", 6))
    assert f.text() == "xi + t ; t^2*xi"
