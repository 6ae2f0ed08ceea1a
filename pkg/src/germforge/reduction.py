"""Graded reduction of a map germ over a quasihomogeneous initial part.

At each weighted degree ``k`` the homogeneous part of ``f - f0`` is split as
an element of the graded tangent space of ``f0`` plus a combination of
complement monomials.  The tangent-space part is removed by composing with
the corresponding source and target diffeomorphisms, so that higher degrees
pick up every side effect exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from . import linalg
from .errors import ContractViolation
from .germ import MapGerm
from .series import Series2, Weighting
from .tanspace import VecMono


def monomials_of_degree(w: Weighting, d: int) -> list[tuple[int, int]]:
    out = []
    for i in range(d // w.a + 1):
        rest = d - w.a * i
        if rest % w.b == 0:
            out.append((i, rest // w.b))
    return out


class _Raw:
    """Weight pair that need not be coprime (target weights such as (2, 4))."""

    def __init__(self, tw):
        self.a, self.b = tw

    def degree(self, e):
        return self.a * e[0] + self.b * e[1]


@dataclass
class GradedReduction:
    weights: Weighting
    targetWeights: tuple[int, int]
    residuals: dict[int, list[tuple[VecMono, mpq]]] = field(default_factory=dict)
    complements: dict[int, list[VecMono]] = field(default_factory=dict)
    final: MapGerm | None = None
    reached: int = 0

    def coefficient(self, k: int, mono: VecMono) -> mpq:
        for m, c in self.residuals.get(k, []):
            if m == mono:
                return c
        return mpq(0)


def graded_reduce(f: MapGerm, f0: MapGerm, w: Weighting, tw: tuple[int, int], kmax: int) -> GradedReduction:
    """Reduce ``f`` degree by degree over the quasihomogeneous ``f0``.

    Complement monomials are preferred in the order: pure powers ``(0, t^d)``,
    other second-component monomials, then first-component ones.
    """
    if f.trunc.weighting is not None:
        raise ContractViolation("graded reduction expects a total-degree truncation")
    N = f.trunc.bound
    for comp, s, s0 in ((0, f.p, f0.p), (1, f.q, f0.q)):
        if s.weighted_jet(w, tw[comp]) != s0.weighted_jet(w, tw[comp]):
            raise ContractViolation("f does not start with the given quasihomogeneous part")
    raw_tw = _Raw(tw)
    out = GradedReduction(w, tw)
    tr = f.trunc
    d0 = {"xi": (f0.p.diff("xi").retruncate(tr), f0.q.diff("xi").retruncate(tr)),
          "t": (f0.p.diff("t").retruncate(tr), f0.q.diff("t").retruncate(tr))}
    cur = f
    for k in range(1, kmax + 1):
        if (max(tw) + k) // min(w.a, w.b) > N:
            break
        basis = ([VecMono(0, i, j) for i, j in monomials_of_degree(w, tw[0] + k)]
                 + [VecMono(1, i, j) for i, j in monomials_of_degree(w, tw[1] + k)])
        index = {m: c for c, m in enumerate(basis)}

        def coords(p: Series2 | None, q: Series2 | None) -> dict[int, object]:
            row = {}
            for comp, s in ((0, p), (1, q)):
                if s is None:
                    continue
                for (i, j), c in s.terms.items():
                    col = index.get(VecMono(comp, i, j))
                    if col is not None:
                        row[col] = c
            return row

        gens: list[tuple[str, tuple[int, int], dict]] = []
        for var, wt in (("xi", w.a), ("t", w.b)):
            for i, j in monomials_of_degree(w, wt + k):
                m = Series2.monomial(i, j, 1, tr)
                dp, dq = d0[var]
                gens.append((var, (i, j), coords(m * dp, m * dq)))
        pulls = {}
        for comp in (0, 1):
            for i, j in monomials_of_degree(raw_tw, tw[comp] + k):
                if (i, j) not in pulls:
                    pulls[(i, j)] = (f0.p ** i) * (f0.q ** j)
                s = pulls[(i, j)]
                gens.append((f"z{comp}", (i, j), coords(s if comp == 0 else None, s if comp == 1 else None)))
        rows = [g[2] for g in gens]
        priority = ([index[m] for m in basis if m.comp == 1 and m.i == 0]
                    + [index[m] for m in basis if m.comp == 1 and m.i > 0]
                    + [index[m] for m in basis if m.comp == 0])
        comp_cols = linalg.greedy_complement(rows, len(basis), priority)
        out.complements[k] = [basis[c] for c in comp_cols]
        target = coords(cur.p.graded_part(w, tw[0] + k), cur.q.graded_part(w, tw[1] + k))
        vecs = rows + [{c: 1} for c in comp_cols]
        sol = linalg.solve_in_span(vecs, target, len(basis))
        if sol is None:
            raise ContractViolation("graded part outside tangent space plus complement")
        res = [(basis[c], sol[len(rows) + n]) for n, c in enumerate(comp_cols) if sol[len(rows) + n]]
        out.residuals[k] = res
        # build and apply the diffeomorphisms
        eta = {"xi": {}, "t": {}}
        zeta = {0: {}, 1: {}}
        for (kind, e, _), coef in zip(gens, sol[:len(rows)]):
            if not coef:
                continue
            if kind in eta:
                eta[kind][e] = eta[kind].get(e, 0) + coef
            else:
                comp = int(kind[1])
                zeta[comp][e] = zeta[comp].get(e, 0) + coef
        if any(eta[v] for v in eta) or any(zeta[c] for c in zeta):
            z1 = Series2(zeta[0], tr).substitute(cur.p, cur.q) if zeta[0] else Series2.zero(tr)
            z2 = Series2(zeta[1], tr).substitute(cur.p, cur.q) if zeta[1] else Series2.zero(tr)
            left = MapGerm(cur.p - z1, cur.q - z2)
            u = Series2.xi(tr) - Series2(eta["xi"], tr)
            v = Series2.t(tr) - Series2(eta["t"], tr)
            cur = left.compose_right(u, v)
        out.reached = k
    out.final = cur
    return out
