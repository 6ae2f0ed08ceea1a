import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NORMAL_FORMS
from germforge import linalg
from germforge.catalog import extra_directions, parse_class, table_direction_series
from germforge.parser import parse_map, parse_series
from germforge.series import Weighting
from germforge.tanspace import (codimension, miniversal_basis, reduced_tangent_space_contains,
                                reduced_window_missing, tangential_codimension)

NCOLS = 5
rows_st = st.lists(st.dictionaries(st.integers(0, NCOLS - 1),
                                   st.fractions(-3, 3, max_denominator=4), max_size=4),
                   max_size=5)


def sympy_rank(rows, ncols=NCOLS):
    if not rows:
        return 0
    M = sympy.Matrix([[sympy.Rational(str(r.get(c, 0))) for c in range(ncols)] for r in rows])
    return M.rank()


@given(rows_st)
@settings(max_examples=60)
def test_rank_matches_sympy(rows):
    assert linalg.rank(rows, NCOLS) == sympy_rank(rows)


@given(rows_st, st.permutations(list(range(NCOLS))))
@settings(max_examples=60)
def test_greedy_complement_is_a_complement(rows, prio):
    picks = linalg.greedy_complement(rows, NCOLS, prio)
    units = [{c: 1} for c in picks]
    assert sympy_rank(list(rows) + units) == NCOLS
    assert len(picks) == NCOLS - sympy_rank(rows)
    # each pick is the first independent column available at its turn
    kept = []
    for c in prio:
        if sympy_rank(list(rows) + [{k: 1} for k in kept + [c]]) > sympy_rank(list(rows) + [{k: 1} for k in kept]):
            kept.append(c)
    assert picks == kept


def test_solve_in_span():
    vecs = [{0: 1, 1: 1}, {1: 1, 2: mpq(1, 2)}]
    sol = linalg.solve_in_span(vecs, {0: 2, 1: 5, 2: mpq(3, 2)}, 3)
    assert sol == [2, 3]
    assert linalg.solve_in_span(vecs, {2: 1}, 3) is None


SIMPLE = ["S1,1", "S1,2", "T1", "T2", "S2,2", "S2,3+", "S2,4"]


@pytest.mark.parametrize("name", SIMPLE)
def test_miniversal_table_spans_and_fills(name):
    cls = parse_class(name)
    f = parse_map("xi + t ; " + NORMAL_FORMS[name], 20)
    extra = [parse_series(e, 20) for e in extra_directions(cls)]
    mb = miniversal_basis(f, 12, table_direction_series(cls, 20), extra)
    assert mb.tableSpans and mb.tableFills
    assert len(mb.full) == cls.codim
    assert len(mb.tangential) == cls.tangCodim


def test_wrong_table_is_detected():
    f = parse_map("xi + t ; " + NORMAL_FORMS["S1,2"], 20)
    # t^3 alone misses a tangential direction
    mb = miniversal_basis(f, 12, [parse_series("t^3", 20)], [parse_series("t", 20)])
    assert mb.tableSpans is False and mb.tableFills is False


def test_codimension_of_generic_points():
    assert codimension(parse_map("xi + t ; t^2", 12), 8) == (0, True)
    assert tangential_codimension(parse_map("xi + t ; t^2*xi", 12), 8) == (0, True)


@pytest.mark.parametrize("text, w, p, q", [
    ("xi ; t^5 + t^2*xi", Weighting(3, 1), 8, 10),
    ("xi ; t^3 + t^2*xi^2", Weighting(1, 2), 2, 7),
    ("xi ; t^4 + t^2*xi + t^5", Weighting(2, 1), 4, 6),
])
def test_tightened_inclusion_fails(text, w, p, q):
    f = parse_map(text, 30)
    assert reduced_tangent_space_contains(f, w, p, q)
    assert reduced_window_missing(f, w, p, q) == []
    tighter = [(p - 1, q), (p, q - 1)]
    assert any(not reduced_tangent_space_contains(f, w, a, b) for a, b in tighter)
