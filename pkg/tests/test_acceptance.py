"""The acceptance criteria, one test each.  A PASS/FAIL line per criterion is
printed in the terminal summary (see conftest.py)."""

import math
import random
import time
from pathlib import Path

import numpy as np
import pytest
import sympy
from gmpy2 import mpq

from conftest import NORMAL_FORMS, random_conjugate
from germforge.catalog import adjacency, normal_form, simple_classes
from germforge.classify import classify, s2_suborbit
from germforge.deform import QFamily, axis, bifurcation_grid, q_discriminant
from germforge.envelope import emit, envelope_branches, trace_numeric
from germforge.germ import MapGerm, family_from_graph, prenormal_from_text, to_prenormal
from germforge.parser import parse_map
from germforge.series import Series2, Weighting
from germforge.tanspace import codimension, reduced_tangent_space_contains, tangential_codimension

GOLDEN = Path(__file__).parent / "golden"
ORDER = ["I", "II", "S1,1", "S1,2", "S1,3", "T1", "T2", "T3", "S2,2", "S2,3+", "S2,3-", "S2,4"]


@pytest.mark.criterion(1, "codimension table, exact and stabilized, under 60 s")
def test_codimension_table():
    expected = (0, 1, 2, 3, 4, 3, 5, 7, 3, 4, 4, 5)
    t0 = time.perf_counter()
    got = []
    for name in ORDER:
        c, stable = codimension(parse_map("xi + t ; " + NORMAL_FORMS[name], 24), 14)
        assert stable, name
        got.append(c)
    elapsed = time.perf_counter() - t0
    assert tuple(got) == expected
    assert elapsed < 60.0


@pytest.mark.criterion(2, "tangential codimension table, exact and stabilized")
def test_tangential_codimension_table():
    expected = (0, 0, 1, 2, 3, 1, 2, 3, 2, 3, 3, 4)
    got = []
    for name in ORDER:
        tau, stable = tangential_codimension(parse_map("xi + t ; " + NORMAL_FORMS[name], 24), 14)
        assert stable, name
        got.append(tau)
    assert tuple(got) == expected


@pytest.mark.criterion(3, "envelope branch orders of the normal forms")
def test_envelope_orders():
    for n in (1, 2, 3):
        rep = envelope_branches(prenormal_from_text(NORMAL_FORMS[f"S1,{n}"], 16))
        assert len(rep.otherBranches) == 1
        br = rep.otherBranches[0]
        assert br.order == (2 * n + 3, 2)
        assert br.side.kind == "OneSide"
    for name in ("S2,2", "S2,3+", "S2,3-", "S2,4"):
        rep = envelope_branches(prenormal_from_text(NORMAL_FORMS[name], 16))
        assert [b.order for b in rep.otherBranches] == [(5, 3)], name
    for n in (1, 2, 3):
        rep = envelope_branches(prenormal_from_text(NORMAL_FORMS[f"T{n}"], 16))
        assert len(rep.otherBranches) == 1
        br = rep.otherBranches[0]
        assert br.order == (1, 1)
        assert br.contact == 3 * n + 2
    rep = envelope_branches(prenormal_from_text("t^2*(t+xi) + t^6 + t^7", 16))
    assert [b.order for b in rep.otherBranches] == [(6, 4)]


def _orders(rep):
    return [tuple(b["order"]) if b["order"] else None for b in rep.envelopeOrders]


@pytest.mark.criterion(4, "classifier idempotence and invariance under 100 random conjugations per class")
def test_idempotence_and_invariance():
    rng = random.Random(4)
    failures = []
    for cls in simple_classes(3):
        ref = classify(normal_form(cls, 12))
        assert ref.cls == cls
        f = normal_form(cls, 12).as_map()
        for trial in range(100):
            g = random_conjugate(f, rng)
            try:
                rep = classify(g)
            except Exception as ex:  # recorded, never skipped
                failures.append((cls.name, trial, repr(ex)))
                continue
            if rep.cls != ref.cls or rep.cls.n != ref.cls.n or rep.cls.sign != ref.cls.sign:
                failures.append((cls.name, trial, rep.cls.name))
            elif _orders(rep) != _orders(ref):
                failures.append((cls.name, trial, _orders(rep)))
    assert failures == []


def _graph_germ(psi_text: str, N: int = 16) -> MapGerm:
    return family_from_graph(parse_map("xi ; " + psi_text, N).q)


@pytest.mark.criterion(5, "the four S2 orbits are separated; the sign is invariant under rescalings")
def test_s2_orbits():
    reps = {"t^5 + t^2*xi + t^6": "S2,2", "t^5 + t^2*xi + t^9": "S2,3+",
            "t^5 + t^2*xi - t^9": "S2,3-", "t^5 + t^2*xi": "S2,4"}
    names = set()
    for psi, name in reps.items():
        pf = to_prenormal(_graph_germ(psi))
        got = classify(pf).cls.name
        assert got == name
        names.add(got)
    assert len(names) == 4
    # rescalings xi -> a xi, t -> b t, y -> c y (b of either sign) and t -> -t with y -> -y
    for psi in ("t^5 + t^2*xi + t^9", "t^5 + t^2*xi - t^9"):
        f = _graph_germ(psi)
        base = s2_suborbit(to_prenormal(f))
        tr = f.trunc
        xi, t = Series2.xi(tr), Series2.t(tr)
        for a, b, c in ((2, 1, 1), (mpq(1, 3), 2, 5), (1, -1, 1), (3, -2, mpq(1, 2)), (1, -1, -1)):
            g = f.compose_right(xi.scale(a), t.scale(b)).compose_left(Series2.xi(tr), Series2.t(tr).scale(c))
            res = s2_suborbit(to_prenormal(g))
            assert res.cls == base.cls
            # the graded oracle: c9 scales by a positive factor
            assert (res.c9 > 0) == (base.c9 > 0)


@pytest.mark.criterion(6, "reduced tangent space inclusions")
def test_reduced_inclusions():
    cases = [
        ("xi ; t^5 + t^2*xi", Weighting(3, 1), 8, 10),
        ("xi ; t^3 + t^2*xi^2", Weighting(1, 2), 2, 7),
        ("xi ; t^3 + t^2*xi^3", Weighting(1, 3), 2, 10),
        ("xi ; t^4 + t^2*xi + t^5", Weighting(2, 1), 4, 6),
        ("xi ; t^4 + t^2*xi + t^7", Weighting(2, 1), 6, 8),
    ]
    for text, w, p, q in cases:
        assert reduced_tangent_space_contains(parse_map(text, 30), w, p, q), text


@pytest.mark.criterion(7, "T_n swallowtail discriminants")
def test_swallowtail():
    rng = np.random.default_rng(7)
    # n = 2: Q = (x - r)^2 (x + 2r)
    for r in rng.uniform(-1.5, 1.5, 100):
        l2, l1 = -3 * r * r, 2 * r ** 3
        d = q_discriminant(QFamily(2, (float(l1), float(l2))))
        assert abs(d) < 1e-9
        assert abs(4 * l2 ** 3 + 27 * l1 ** 2) < 1e-9
    # n = 3: sign on a 21^3 rational grid against real-root counting
    x = sympy.Symbol("x")
    ax = axis(-1, 1, 21)
    for l1 in ax:
        for l2 in ax:
            for l3 in ax:
                got = q_discriminant(QFamily(3, (l1, l2, l3)))
                Q = sympy.Poly(x ** 4 + _r(l3) * x ** 2 + _r(l2) * x + _r(l1), x)
                if sympy.degree(sympy.gcd(Q, Q.diff(x)), x) > 0:
                    want = 0
                else:
                    pairs = (4 - Q.count_roots()) // 2
                    want = (-1) ** pairs  # d(d-1)/2 = 6 is even
                assert (got > 0) - (got < 0) == want, (l1, l2, l3)


def _r(v):
    return sympy.Rational(int(v.numerator), int(v.denominator))


@pytest.mark.criterion(8, "S1,3 bifurcation grid follows the first-nonzero-direction rule")
def test_flag_strata():
    grid = bifurcation_grid("S1,3", [axis(-1, 1, 7)] * 3, trunc=14)
    assert len(grid.points) == 343
    for p in grid.points:
        j = next((k for k, v in enumerate(p.lam) if v), None)
        want = "S1,3" if j is None else ("II" if j == 0 else f"S1,{j}")
        assert p.label == want, p.lam


@pytest.mark.criterion(9, "U-type cross ratio (a + sqrt(a^2 - 1))^2, even in a, separates a = 2 and a = 3")
def test_cross_ratio():
    def f_a(a):
        a = mpq(a)
        psi = Series2({(0, 4): mpq(1, 4), (1, 3): 2 * a / 3, (2, 2): mpq(1, 2)}, 16)
        return classify(family_from_graph(psi))

    vals = {}
    for a in (mpq(5, 4), mpq(2), mpq(3)):
        rep, neg = f_a(a), f_a(-a)
        assert rep.cls.name == "U"
        want = (float(a) + math.sqrt(float(a) ** 2 - 1)) ** 2
        assert abs(rep.crossRatio.value - want) < 1e-9
        assert abs(neg.crossRatio.value - rep.crossRatio.value) < 1e-9
        vals[a] = rep.crossRatio.value
    assert abs(vals[mpq(5, 4)] - 4) < 1e-9
    assert abs(vals[mpq(2)] - vals[mpq(3)]) > 0.1


@pytest.mark.criterion(10, "II tracer matches y = 4/27 x^3; SVG/CSV goldens byte-identical")
def test_tracer():
    pf = prenormal_from_text(NORMAL_FORMS["II"], 16)
    sk = trace_numeric(pf, (-0.5, 0.5, -0.5, 0.5), 400)
    crit = [ln for ln, lab in zip(sk.polylines, sk.labels) if lab == "criminant"]
    assert crit
    err = max(float(np.max(np.abs(ln[:, 1] - 4 / 27 * ln[:, 0] ** 3))) for ln in crit)
    assert err < 1e-6
    svg, csv = emit(sk, "svg"), emit(sk, "csv")
    again = trace_numeric(pf, (-0.5, 0.5, -0.5, 0.5), 400)
    assert emit(again, "svg") == svg and emit(again, "csv") == csv
    assert (GOLDEN / "II_envelope.svg").read_bytes() == svg
    assert (GOLDEN / "II_envelope.csv").read_bytes() == csv


POSITIVE = [("S1,1", "II"), ("T3", "T2"), ("II", "I"), ("T1", "II"), ("S1,2", "S1,1"),
            ("S2,2", "S1,1"), ("S2,3+", "S2,2"), ("S2,4", "S2,3-"), ("U", "Tinf"),
            ("Sinf", "S3"), ("S3", "S2,4"), ("S1,inf", "S1,5")]
NEGATIVE = [("II", "S1,1"), ("I", "II"), ("T2", "T3"), ("S1,1", "T1"), ("T1", "S1,1"),
            ("S2,2", "S2,3+"), ("S2,3+", "S2,3-"), ("S1,1", "S2,2"), ("T3", "S1,1"),
            ("Tinf", "S1,1"), ("S1,inf", "T1"), ("S2,4", "T1")]


@pytest.mark.criterion(11, "adjacency closure: 12 positive and 12 negative queries")
def test_adjacency_queries():
    assert len(POSITIVE) == 12 and len(NEGATIVE) == 12
    for a, b in POSITIVE:
        assert adjacency(a, b), (a, b)
    for a, b in NEGATIVE:
        assert not adjacency(a, b), (a, b)
