"""Tangent spaces of map germs at finite degree: codimension, tangential
codimension, miniversal complements and the reduced tangent space.

Everything is computed modulo vector monomials above a degree bound and
checked for stability by repeating the computation at a higher bound.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .errors import ContractViolation, TruncationTooLow
from .germ import MapGerm
from .series import TOTAL, Series2, Trunc, Weighting, monomial_text, qstr

DEFAULT_DEGREE = 14
MAX_DEGREE = 20


@dataclass(frozen=True, order=True)
class VecMono:
    """Vector monomial: ``xi^i t^j`` in component ``comp`` (0 = x, 1 = y)."""

    comp: int
    i: int
    j: int

    def text(self) -> str:
        m = monomial_text(self.i, self.j)
        return f"({m},0)" if self.comp == 0 else f"(0,{m})"

    def __str__(self) -> str:
        return self.text()


class JetVectorSpace:
    """All vector monomials with weighted degree at most ``bounds[comp]``."""

    def __init__(self, degreeBound: int | tuple[int, int], weighting: Weighting = TOTAL):
        if isinstance(degreeBound, int):
            degreeBound = (degreeBound, degreeBound)
        self.bounds = degreeBound
        self.weighting = weighting
        w = weighting
        basis = []
        for comp in (0, 1):
            bound = self.bounds[comp]
            for i in range(bound // w.a + 1):
                for j in range((bound - w.a * i) // w.b + 1):
                    basis.append(VecMono(comp, i, j))
        basis.sort(key=self.order_key)
        self.basis: list[VecMono] = basis
        self.index = {m: k for k, m in enumerate(basis)}

    @property
    def degreeBound(self) -> int:
        return max(self.bounds)

    def order_key(self, m: VecMono):
        return (self.weighting.degree((m.i, m.j)), -m.i, m.comp)

    def __len__(self) -> int:
        return len(self.basis)

    def coords(self, p: Series2 | None, q: Series2 | None) -> dict[int, object]:
        """Coordinates of the vector ``(p, q)``, dropping monomials above the bounds."""
        row = {}
        for comp, s in ((0, p), (1, q)):
            if s is None:
                continue
            for (i, j), c in s.terms.items():
                k = self.index.get(VecMono(comp, i, j))
                if k is not None:
                    row[k] = c
        return row


@dataclass
class LinearSubspace:
    ambient: JetVectorSpace
    generators: list[dict[int, object]]

    @cached_property
    def rank(self) -> int:
        return linalg.rank(self.generators, len(self.ambient))

    @cached_property
    def pivots(self) -> list[VecMono]:
        cols = linalg.pivot_columns(self.generators, len(self.ambient))
        return [self.ambient.basis[c] for c in cols]

    @property
    def codim(self) -> int:
        return len(self.ambient) - self.rank

    def extended(self, rows: Iterable[dict[int, object]]) -> "LinearSubspace":
        return LinearSubspace(self.ambient, self.generators + list(rows))

    def contains(self, row: dict[int, object]) -> bool:
        return linalg.contains(self.generators, len(self.ambient), row, self.rank)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([m.text() for m in self.ambient.basis])
        for row in self.generators:
            w.writerow([qstr(row[k]) if k in row else "0" for k in range(len(self.ambient))])
        return buf.getvalue()


# ---------------------------------------------------------------------------

def _powers(s: Series2, n: int) -> list[Series2]:
    out = [Series2.const(1, s.trunc)]
    for _ in range(n):
        out.append(out[-1] * s)
    return out


def _shift(s: Series2, i: int, j: int) -> Series2:
    """``xi^i t^j * s`` with the truncation filter applied."""
    return Series2({(a + i, b + j): c for (a, b), c in s.terms.items()}, s.trunc)


def _pullbacks(f: MapGerm, trunc: Trunc, admit) -> list[tuple[tuple[int, int], Series2]]:
    """``x^i y^j o f`` for exponents accepted by ``admit``, nonzero within ``trunc``."""
    p, q = f.p.retruncate(trunc), f.q.retruncate(trunc)
    w = trunc.weights
    ordp, ordq = p.order(w), q.order(w)
    if ordp is None or ordq is None:
        raise ContractViolation("map germ component vanishes within the truncation")
    maxi = trunc.bound // max(ordp, 1)
    maxj = trunc.bound // max(ordq, 1)
    pp, qp = _powers(p, maxi), _powers(q, maxj)
    out = []
    for i in range(maxi + 1):
        for j in range(maxj + 1):
            if ordp * i + ordq * j > trunc.bound or not admit(i, j):
                continue
            out.append(((i, j), pp[i] * qp[j]))
    return out


def _check_trunc(f: MapGerm, N: int) -> None:
    if f.trunc.weighting is not None:
        raise ContractViolation("tangent space expects a total-degree truncation")
    if f.trunc.bound < N + 1:
        raise TruncationTooLow(f"need the {N + 1}-jet of f, have {f.trunc.bound}")


def tangent_space(f: MapGerm, N: int) -> LinearSubspace:
    """``Tf`` modulo vector monomials of degree > N."""
    _check_trunc(f, N)
    amb = JetVectorSpace(N)
    tr = Trunc(N)
    g = f.retruncate(N + 1)
    pxi, qxi = g.p.diff("xi").retruncate(tr), g.q.diff("xi").retruncate(tr)
    pt, qt = g.p.diff("t").retruncate(tr), g.q.diff("t").retruncate(tr)
    rows = []
    for i in range(N + 1):
        for j in range(N + 1 - i):
            rows.append(amb.coords(_shift(pxi, i, j), _shift(qxi, i, j)))
            rows.append(amb.coords(_shift(pt, i, j), _shift(qt, i, j)))
    for _, s in _pullbacks(g, tr, lambda i, j: True):
        rows.append(amb.coords(s, None))
        rows.append(amb.coords(None, s))
    return LinearSubspace(amb, [r for r in rows if r])


def tangential_directions(amb: JetVectorSpace) -> list[int]:
    """Columns of the monomials ``(0, t^2 m)``."""
    return [k for k, m in enumerate(amb.basis) if m.comp == 1 and m.j >= 2]


def _unit(k: int) -> dict[int, object]:
    return {k: 1}


def _stable_value(f: MapGerm, N: int, compute) -> tuple[int, bool, int]:
    """Evaluate ``compute(N)`` and ``compute(N + 2)``, raising N until they agree."""
    n = N
    while True:
        if f.trunc.bound < n + 3:
            val = compute(n)
            return val, False, n
        a, b = compute(n), compute(n + 2)
        if a == b:
            return a, True, n
        if n + 2 > MAX_DEGREE:
            return b, False, n + 2
        n += 2


def codimension(f: MapGerm, N: int = DEFAULT_DEGREE) -> tuple[int, bool]:
    val, stable, _ = _stable_value(f, N, lambda n: tangent_space(f, n).codim)
    return val, stable


def _tau_at(f: MapGerm, n: int) -> int:
    tf = tangent_space(f, n)
    ext = tf.extended(_unit(k) for k in tangential_directions(tf.ambient))
    return ext.rank - tf.rank


def _require_prenormal(f: MapGerm) -> None:
    if not (f.p.coeff(1, 0) == 1 and f.p.coeff(0, 1) == 1 and len(f.p) == 2):
        raise ContractViolation("tangential codimension needs the presentation (xi + t, phi)")
    if not f.q.divisible_by_t(2):
        raise ContractViolation("tangential codimension needs phi divisible by t^2")


def tangential_codimension(f: MapGerm, N: int = DEFAULT_DEGREE) -> tuple[int, bool]:
    _require_prenormal(f)
    val, stable, _ = _stable_value(f, N, lambda n: _tau_at(f, n))
    return val, stable


@dataclass
class MiniversalBasis:
    full: list[VecMono]
    tangential: list[VecMono]
    degree: int
    tableSpans: bool | None = None
    tableFills: bool | None = None

    def to_json(self) -> dict:
        return {
            "full": [m.text() for m in self.full],
            "tangential": [m.text() for m in self.tangential],
            "degree": self.degree,
            "tableSpans": self.tableSpans,
            "tableFills": self.tableFills,
        }


def miniversal_basis(f: MapGerm, N: int = DEFAULT_DEGREE,
                     table: Sequence[Series2] | None = None,
                     extra: Sequence[Series2] = ()) -> MiniversalBasis:
    """Greedy monomial complement of ``Tf``, tangential monomials first.

    With ``table`` given (second-component directions), also checks that they
    span the tangential complement and that ``table + extra`` fill the quotient.
    """
    c, stable = codimension(f, N)
    if not stable:
        raise TruncationTooLow("codimension not stable; cannot pick a complement")
    _, _, n = _stable_value(f, N, lambda k: tangent_space(f, k).codim)
    tf = tangent_space(f, n)
    amb = tf.ambient
    tan = tangential_directions(amb)
    rest = [k for k in range(len(amb)) if k not in set(tan)]
    picks = linalg.greedy_complement(tf.generators, len(amb), tan + rest)
    tan_set = set(tan)
    full = [amb.basis[k] for k in picks]
    tangential = [amb.basis[k] for k in picks if k in tan_set]
    out = MiniversalBasis(full, tangential, n)
    if len(full) != c:
        raise TruncationTooLow("complement size disagrees with the codimension")
    if table is not None:
        dirs = [amb.coords(None, e) for e in table]
        with_table = tf.extended(dirs)
        with_tan = tf.extended(_unit(k) for k in tan)
        out.tableSpans = (with_table.rank == with_tan.rank
                          and with_table.rank - tf.rank == len(dirs)
                          and with_tan.extended(dirs).rank == with_tan.rank)
        full_space = with_table.extended(amb.coords(None, e) for e in extra)
        out.tableFills = full_space.rank == len(amb)
    return out


# ---------------------------------------------------------------------------
# reduced tangent space

def reduced_tangent_space(f: MapGerm, w: Weighting, P: int, Q: int) -> LinearSubspace:
    """``T_r f = df(g_+) + M`` modulo monomials of weighted degree above ``(P, Q)``.

    ``g_+`` are source vector fields of positive weighted order and
    ``M = f*<x^2, y> e_1 + f*<x, y^2> e_2``.
    """
    top = max(P, Q)
    tr = Trunc(top + max(w.a, w.b), w)
    amb = JetVectorSpace((P, Q), w)
    p, q = f.p, f.q
    # every monomial of weighted degree <= tr.bound has total degree <= need
    need = tr.bound // min(w.a, w.b)
    if f.trunc.bound < need:
        raise TruncationTooLow(f"weighted degree {tr.bound} needs the {need}-jet of f")
    g = MapGerm(p.retruncate(Trunc(need)), q.retruncate(Trunc(need)))
    g = MapGerm(Series2(dict(g.p.terms), tr), Series2(dict(g.q.terms), tr))
    pxi, qxi = g.p.diff("xi").retruncate(tr), g.q.diff("xi").retruncate(tr)
    pt, qt = g.p.diff("t").retruncate(tr), g.q.diff("t").retruncate(tr)
    rows = []
    for i in range(tr.bound // w.a + 1):
        for j in range((tr.bound - w.a * i) // w.b + 1):
            deg = w.degree((i, j))
            if deg > w.a:
                rows.append(amb.coords(_shift(pxi, i, j), _shift(qxi, i, j)))
            if deg > w.b:
                rows.append(amb.coords(_shift(pt, i, j), _shift(qt, i, j)))
    for _, s in _pullbacks(g, tr, lambda i, j: i >= 2 or j >= 1):
        rows.append(amb.coords(s, None))
    for _, s in _pullbacks(g, tr, lambda i, j: i >= 1 or j >= 2):
        rows.append(amb.coords(None, s))
    return LinearSubspace(amb, [r for r in rows if r])


def _window(amb: JetVectorSpace, w: Weighting, p: int, q: int) -> list[int]:
    return [k for k, m in enumerate(amb.basis) if w.degree((m.i, m.j)) >= (p if m.comp == 0 else q)]


def reduced_tangent_space_contains(f: MapGerm, w: Weighting, p: int, q: int,
                                   slack: int | None = None) -> bool:
    """Whether every vector monomial of ``m~^p x m~^q`` up to weighted degree
    ``(p + slack, q + slack)`` lies in ``T_r f`` modulo higher degrees."""
    if slack is None:
        slack = 2 * max(w.a, w.b)
    tr = reduced_tangent_space(f, w, p + slack, q + slack)
    window = _window(tr.ambient, w, p, q)
    return tr.extended(_unit(k) for k in window).rank == tr.rank


def reduced_window_missing(f: MapGerm, w: Weighting, p: int, q: int,
                           slack: int | None = None) -> list[VecMono]:
    """Window monomials outside ``T_r f`` (diagnostic counterpart of the inclusion test)."""
    if slack is None:
        slack = 2 * max(w.a, w.b)
    tr = reduced_tangent_space(f, w, p + slack, q + slack)
    return [tr.ambient.basis[k] for k in _window(tr.ambient, w, p, q) if not tr.contains(_unit(k))]
