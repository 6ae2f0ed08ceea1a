import math
from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from germforge.errors import Inconclusive
from germforge.parser import parse_series
from germforge.puiseux import (PlaneBranch, branch_side, branches, contact_order, newton_polygon,
                               param_branch_order)
from germforge.series import Series2

U, X, T = sympy.symbols("u xi t")


def residual_order(g: Series2, br) -> Fraction:
    """u-order of g(u^q, t(u)) divided by q: an independent substitution oracle."""
    q = br.ramification
    tu = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * U ** int(e * q) for e, c in br.coeffs)
    expr = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * U ** (q * i) * tu ** j
               for (i, j), c in g.terms.items())
    poly = sympy.Poly(sympy.expand(expr), U)
    if poly.is_zero:
        return Fraction(10 ** 6)
    return Fraction(min(m[0] for m in poly.monoms()), q)


def test_newton_polygon_segments():
    segs = newton_polygon(parse_series("t^2 - xi^3 + t*xi^5", 12))
    assert len(segs) == 1
    assert segs[0].exponent == Fraction(3, 2)


def test_semicubical_parabola():
    g = parse_series("t^2 - xi^3", 12)
    bl = branches(g)
    # both conjugates t = +-xi^(3/2) are listed
    assert len(bl) == 2
    assert sorted(br.coeffs[0][1] for br in bl) == [-1, 1]
    for br in bl:
        assert br.ramification == 2 and br.multiplicity == 1
        assert br.coeffs[0][0] == Fraction(3, 2)
        assert br.truncOrder == Fraction(23, 2)
        assert residual_order(g, br) >= br.truncOrder


@pytest.mark.parametrize("text, leads", [
    ("2*xi - t", [1]),
    ("t*(t^2 + 5/2*t*xi + xi^2)", [None, 1, 1]),
    ("t^3 - xi^2*t + xi^5", None),
])
def test_branches_vanish_to_certified_order(text, leads):
    g = parse_series(text, 12)
    bl = branches(g)
    for br in bl:
        if br.numeric or not br.coeffs:
            continue
        assert residual_order(g, br) >= br.truncOrder


def test_three_lines():
    g = parse_series("t*(t^2 + 5/2*t*xi + xi^2)", 12)
    bl = branches(g)
    leads = sorted(br.coeffs[0][1] if br.coeffs else 0 for br in bl)
    assert leads == [-2, mpq(-1, 2), 0]


def test_complex_pair_left_unresolved():
    bl = branches(parse_series("t*(t^2 + t*xi + xi^2)", 12))
    assert bl.count_with_multiplicity() == 3
    assert sum(u.branch_count for u in bl.unresolved) == 2


def test_repeated_branch_multiplicity():
    bl = branches(parse_series("(t - xi)^2*(t + xi)", 12))
    assert bl.count_with_multiplicity() == 3
    assert sorted(b.multiplicity for b in bl) == [1, 2]


def test_irrational_roots_go_numeric():
    bl = branches(parse_series("t^2 - 2*xi^2", 12))
    assert len(bl) == 2 and all(b.numeric for b in bl)
    assert sorted(round(complex(b.coeffs[0][1]).real, 12) for b in bl) == [round(-math.sqrt(2), 12),
                                                                            round(math.sqrt(2), 12)]


nonzero = st.integers(-4, 4).filter(bool).map(mpq)


@given(st.lists(nonzero, min_size=1, max_size=3), st.lists(st.integers(1, 3), min_size=1, max_size=3))
@settings(max_examples=30)
def test_product_of_graphs(cs, ks):
    # g = prod (t - c_i xi^k_i); every root must be found exactly
    tr = 14
    g = Series2.const(1, tr)
    for c, k in zip(cs, ks):
        g = g * (Series2.t(tr) - Series2.monomial(k, 0, c, tr))
    bl = branches(g)
    assert bl.count_with_multiplicity() == len(list(zip(cs, ks)))
    for br in bl:
        assert residual_order(g, br) >= br.truncOrder


@pytest.mark.parametrize("X, Y, want", [
    ({2: 1}, {3: 1}, (3, 2)),
    ({3: 1}, {5: 1}, (5, 3)),
    ({2: 1}, {5: 1, 6: 1}, (5, 2)),
    ({1: 1}, {4: 3}, (1, 1)),
    ({2: 1}, {4: 1, 7: 2}, (7, 2)),
    ({2: 1}, {4: 1}, (1, 1)),  # a doubly covered smooth branch
])
def test_branch_orders(X, Y, want):
    assert param_branch_order(PlaneBranch(X, Y, 12)) == want


def test_branch_order_needs_jet():
    with pytest.raises(Inconclusive):
        param_branch_order(PlaneBranch({2: 1, 3: 1}, {4: 1, 5: 2, 6: 1}, 6))


def test_contact_and_side():
    assert contact_order(PlaneBranch({1: 1}, {3: mpq(4, 27)}, 10)) == 2
    assert contact_order(PlaneBranch({1: 1}, {}, 10)) is None
    assert str(branch_side(PlaneBranch({2: 1}, {4: 1}, 10))) == "OneSide(+)"
    assert str(branch_side(PlaneBranch({2: 1}, {3: 1}, 10))) == "BothSides"
    assert str(branch_side(PlaneBranch({2: 1}, {5: -1}, 10))) == "BothSides"
    assert str(branch_side(PlaneBranch({1: 1}, {4: -2}, 10))) == "OneSide(-)"
