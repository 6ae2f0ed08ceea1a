"""Newton-Puiseux branches of truncated bivariate series and plane-branch orders.

Branches are solved as ``t = t(xi)``.  Exact arithmetic is used while every
root of an edge polynomial is rational; a branch through an irrational root
continues in complex floating point and is flagged ``numeric``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import sympy
from gmpy2 import mpq

from .errors import CoefficientFieldTooSmall, ContractViolation, EmptySupportError, Inconclusive
from .series import Series2, lower_left_hull

Number = Union[mpq, complex]
NUMERIC_TOL = 1e-10


@dataclass(frozen=True)
class Segment:
    start: tuple[int, int]
    end: tuple[int, int]

    @property
    def exponent(self) -> Fraction:
        """Leading exponent ``gamma`` of the branches ``t ~ c xi^gamma`` it predicts."""
        return Fraction(self.end[0] - self.start[0], self.start[1] - self.end[1])

    @property
    def slope(self) -> Fraction:
        return Fraction(self.end[1] - self.start[1], self.end[0] - self.start[0])

    @property
    def height(self) -> int:
        return self.start[1] - self.end[1]

    @property
    def lattice_length(self) -> int:
        return math.gcd(self.end[0] - self.start[0], self.start[1] - self.end[1])


def newton_polygon(g: Series2 | dict) -> list[Segment]:
    terms = g.terms if isinstance(g, Series2) else g
    if not terms:
        raise EmptySupportError("Newton polygon of the zero series")
    v = lower_left_hull(terms)
    return [Segment(v[k], v[k + 1]) for k in range(len(v) - 1)]


@dataclass
class PuiseuxBranch:
    """``t = sum coeff * xi^exp``.

    Every term with exponent below ``truncOrder`` is exact and none is missing.
    """

    ramification: int
    coeffs: list[tuple[Fraction, Number]]
    truncOrder: Fraction
    field: str = "real"
    numeric: bool = False
    multiplicity: int = 1
    separated: bool = True

    @property
    def leading(self) -> tuple[Fraction, Number] | None:
        return self.coeffs[0] if self.coeffs else None

    def is_real(self) -> bool:
        return all(not isinstance(c, complex) or abs(c.imag) <= NUMERIC_TOL * max(1, abs(c))
                   for _, c in self.coeffs)

    def to_json(self) -> dict:
        def cj(c):
            if isinstance(c, complex):
                return [c.real, c.imag]
            return str(c)

        return {
            "ramification": self.ramification,
            "terms": [{"exp": str(e), "coeff": cj(c)} for e, c in self.coeffs],
            "field": self.field,
            "numeric": self.numeric,
            "multiplicity": self.multiplicity,
            "truncOrder": str(self.truncOrder),
        }


@dataclass
class UnresolvedFactor:
    """Edge-polynomial factor with no real roots, left in factored form."""

    prefix: list[tuple[Fraction, Number]]
    exponent: Fraction
    poly: list[mpq]  # coefficients, highest degree first, in the edge variable c
    multiplicity: int

    @property
    def branch_count(self) -> int:
        return (len(self.poly) - 1) * self.multiplicity


class BranchList(list):
    """List of :class:`PuiseuxBranch` plus factors left unresolved over the reals."""

    def __init__(self, items=(), unresolved=None, vertical: int = 0):
        super().__init__(items)
        self.unresolved: list[UnresolvedFactor] = list(unresolved or [])
        self.vertical = vertical

    def count_with_multiplicity(self) -> int:
        return sum(b.multiplicity for b in self) + sum(u.branch_count for u in self.unresolved)


# ---------------------------------------------------------------------------
# polynomial helpers on {(a, b): coeff} dicts (x-exponent a, y-exponent b)

def _is_zero(c: Number) -> bool:
    if isinstance(c, complex):
        return abs(c) <= NUMERIC_TOL
    return not c


def _clean(p: dict) -> dict:
    return {e: c for e, c in p.items() if not _is_zero(c)}


def _binom_row(b: int) -> list[int]:
    return [math.comb(b, k) for k in range(b + 1)]


def _transform(p: dict, q: int, pp: int, c: Number, shift: int, limit: int) -> dict:
    """``P(x^q, x^pp (c + y)) / x^shift`` keeping x-exponents below ``limit``."""
    out: dict = {}
    for (a, b), coeff in p.items():
        base = q * a + pp * b - shift
        if base >= limit:
            continue
        row = _binom_row(b)
        cpow = [1]
        for _ in range(b):
            cpow.append(cpow[-1] * c)
        for k in range(b + 1):
            val = coeff * row[k] * cpow[b - k]
            if _is_zero(val):
                continue
            key = (base, k)
            out[key] = out.get(key, 0) + val
    return _clean(out)


def _edge_roots(coeffs: list, numeric: bool):
    """Roots of ``sum coeffs[k] c^k`` (ascending), grouped as (root, multiplicity, exact).

    Returns ``(roots, irreducible)`` where ``irreducible`` lists exact factors of
    degree >= 2 as (ascending coefficient list, multiplicity).
    """
    if numeric:
        import numpy as np

        asc = [complex(c) for c in coeffs]
        while asc and abs(asc[-1]) <= NUMERIC_TOL:
            asc.pop()
        rts = np.roots(asc[::-1]) if len(asc) > 1 else []
        groups: list[list] = []
        for r in rts:
            r = complex(r)
            for g in groups:
                if abs(g[0] - r) <= 1e-6 * max(1.0, abs(r)):
                    g[1] += 1
                    break
            else:
                groups.append([r, 1])
        return [(r, m, False) for r, m in groups if abs(r) > NUMERIC_TOL], []
    c = sympy.Symbol("c")
    poly = sympy.Poly([sympy.Rational(int(x.numerator), int(x.denominator)) for x in coeffs[::-1]],
                      c, domain="QQ")
    _, factors = poly.factor_list()
    roots, irreducible = [], []
    for fac, mult in factors:
        if fac.degree() == 1:
            a1, a0 = fac.all_coeffs()
            r = -a0 / a1
            if r != 0:
                roots.append((mpq(int(r.p), int(r.q)), mult, True))
        elif fac.degree() > 1:
            asc = [mpq(int(x.p), int(x.q)) for x in fac.all_coeffs()[::-1]]
            irreducible.append((asc, mult))
    return roots, irreducible


def _numeric_roots(asc: list[mpq]) -> list[complex]:
    c = sympy.Symbol("c")
    poly = sympy.Poly([sympy.Rational(int(x.numerator), int(x.denominator)) for x in asc[::-1]], c)
    return [complex(r) for r in poly.nroots(n=30)]


@dataclass
class _State:
    poly: dict
    valid: int  # terms with x-exponent < valid are exact (after current shift)
    prefix: list
    offset: int  # t = known + x^offset * y
    ram: int  # x = xi^(1/ram)
    numeric: bool
    mult: int


def branches(g: Series2, maxTerms: int = 12, field: str = "real", strict: bool = False) -> BranchList:
    """All branches ``t = t(xi)`` of ``g = 0`` through the origin."""
    if field not in ("real", "complex"):
        raise ContractViolation("field must be 'real' or 'complex'")
    if g.is_zero():
        raise EmptySupportError("branches of the zero series")
    if g.constant_term():
        raise ContractViolation("g(0,0) != 0: no branch through the origin")
    w = g.trunc.weights
    bound = g.trunc.bound
    result = BranchList()
    poly = dict(g.terms)
    # pure powers of xi dividing g: vertical branches xi = 0, not of the form t(xi)
    vmin = min(a for a, _ in poly)
    if vmin:
        result.vertical = vmin
        poly = {(a - vmin, b): c for (a, b), c in poly.items()}
        bound -= vmin * w.a
    # t^m | g: the branch t = 0 with multiplicity m
    m = min(b for _, b in poly)
    if m:
        first_unknown = bound // w.a + 1
        result.append(PuiseuxBranch(1, [], _root_bound(poly, m, first_unknown, 0, 1), field, False, m))
        poly = {(a, b - m): c for (a, b), c in poly.items()}
        bound -= m * w.b
    if all(b == 0 for _, b in poly):
        return result
    for seg in newton_polygon(poly):
        gamma = seg.exponent
        q, pp = gamma.denominator, gamma.numerator
        # first substitution: unknown monomials have a*i + b*j > bound
        lim = math.ceil((bound + 1) * min(Fraction(q, w.a), Fraction(pp, w.b)))
        v = q * seg.start[0] + pp * seg.start[1]
        if v >= lim:
            result.append(PuiseuxBranch(q, [], Fraction(0), field, False, seg.height, False))
            continue
        _expand_segment(poly, seg, lim, [], 0, 1, False, maxTerms, field, strict, result)
    return result


def _expand_segment(poly, seg: Segment, limit: int, prefix, offset, ram, numeric,
                    max_terms, field, strict, out: BranchList) -> None:
    """Expand along ``seg``; ``limit`` bounds exact x-exponents after ``x -> x^q``."""
    gamma = seg.exponent
    q, pp = gamma.denominator, gamma.numerator
    edge = {}
    v = q * seg.start[0] + pp * seg.start[1]
    for (a, b), c in poly.items():
        if q * a + pp * b == v:
            edge[b - seg.end[1]] = c
    asc = [edge.get(k, 0) for k in range(seg.height + 1)]
    roots, irreducible = _edge_roots(asc, numeric)
    for asc_f, mult in irreducible:
        approx = _numeric_roots(asc_f)
        real = [r for r in approx if abs(r.imag) <= 1e-12 * max(1.0, abs(r))]
        for r in (approx if field == "complex" else real):
            roots.append((complex(r.real, 0.0) if r in real else r, mult, False))
        if field == "real" and len(real) < len(approx):
            if strict:
                raise CoefficientFieldTooSmall("branch needs a complex algebraic coefficient")
            exp = Fraction(offset * q + pp, ram * q)
            out.unresolved.append(UnresolvedFactor(list(prefix), exp, asc_f[::-1], mult))
    for c, mult, exact in roots:
        num = numeric or not exact
        if num and not numeric:
            conv = {e: complex(float(x)) for e, x in poly.items()}
        else:
            conv = poly
        new_offset = q * offset + pp
        new_ram = ram * q
        term = (Fraction(new_offset, new_ram), c)
        new_valid = limit - v
        nxt = _transform(conv, q, pp, c, v, new_valid)
        state = _State(nxt, new_valid, prefix + [term], new_offset, new_ram, num, mult)
        _continue(state, max_terms, field, strict, out)


def _continue(st: _State, max_terms, field, strict, out: BranchList) -> None:
    fld = "complex" if any(isinstance(c, complex) and abs(c.imag) > NUMERIC_TOL
                           for _, c in st.prefix) else field
    poly = st.poly
    # y^m | P within the exact region: the expansion terminates
    m = min((b for _, b in poly), default=None)
    if m is None or m >= st.mult:
        cert = _root_bound(poly, st.mult, st.valid, st.offset, st.ram)
        out.append(PuiseuxBranch(st.ram, st.prefix, cert, fld, st.numeric, st.mult))
        return
    if len(st.prefix) >= max_terms:
        out.append(_stopped(st, fld))
        return
    if m:
        poly = {(a, b - m): c for (a, b), c in poly.items()}
        out.append(PuiseuxBranch(st.ram, st.prefix, _root_bound(st.poly, m, st.valid, st.offset, st.ram),
                                 fld, st.numeric, m))
    if all(b == 0 for _, b in poly):
        return
    for seg in newton_polygon(poly):
        q, pp = seg.exponent.denominator, seg.exponent.numerator
        v = q * seg.start[0] + pp * seg.start[1]
        if v >= q * st.valid:
            stopped = _stopped(st, fld)
            stopped.multiplicity = seg.height
            out.append(stopped)
            continue
        _expand_segment(poly, seg, q * st.valid, st.prefix, st.offset, st.ram, st.numeric,
                        max_terms, field, strict, out)


def _root_bound(poly: dict, m: int, valid: int, offset: int, ram: int) -> Fraction:
    """Exponent bound for the root ``y = 0`` of multiplicity ``m`` of ``poly``.

    With ``poly = y^m U`` up to unknown terms of x-order ``valid``, the true
    root is ``O(x^((valid - u)/m))`` where ``u`` is the x-order of ``U(x, 0)``.
    """
    u = min((a for (a, b), c in poly.items() if b == m), default=valid)
    return (offset + Fraction(max(valid - u, 0), m)) / ram


def _stopped(st: _State, fld: str) -> PuiseuxBranch:
    # the next exponent of a cluster of st.mult branches is at least 1/st.mult further
    bound = (st.offset + Fraction(1, max(st.mult, 1))) / st.ram
    return PuiseuxBranch(st.ram, st.prefix, bound, fld, st.numeric, st.mult, st.mult == 1)


# ---------------------------------------------------------------------------
# parameterized plane branches

@dataclass
class PlaneBranch:
    """``s -> (X(s), Y(s))``; series are {exponent: coeff} known through ``known``."""

    X: dict[int, Number]
    Y: dict[int, Number]
    known: int
    sOrder: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        self.X = {e: c for e, c in self.X.items() if not _is_zero(c) and e <= self.known}
        self.Y = {e: c for e, c in self.Y.items() if not _is_zero(c) and e <= self.known}
        if 0 in self.X or 0 in self.Y:
            raise ContractViolation("plane branch must pass through the origin")
        if self.sOrder is None and (self.X or self.Y):
            try:
                self.sOrder = param_branch_order(self)
            except Inconclusive:
                self.sOrder = None

    def content_reduced(self) -> "PlaneBranch":
        exps = list(self.X) + list(self.Y)
        d = 0
        for e in exps:
            d = math.gcd(d, e)
        if d <= 1:
            return self
        return PlaneBranch({e // d: c for e, c in self.X.items()},
                           {e // d: c for e, c in self.Y.items()}, self.known // d, self.sOrder)


def _ord(s: dict) -> int | None:
    return min(s) if s else None


def _mul_known(a: dict, b: dict, known: int) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            if e1 + e2 <= known:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if not _is_zero(c)}


def param_branch_order(b: PlaneBranch) -> tuple[int, int]:
    """Multiplicity ``q`` and first characteristic exponent ``p`` as ``(p, q)``; (1,1) if smooth."""
    if not b.X and not b.Y:
        raise ContractViolation("branch is identically zero")
    b = b.content_reduced()
    ox, oy = _ord(b.X), _ord(b.Y)
    q = min(o for o in (ox, oy) if o is not None)
    if q == 1:
        return (1, 1)
    u, v = (b.X, b.Y) if ox == q else (b.Y, b.X)
    known_u, known_v = b.known, b.known
    lead_u = u[q]
    powers = {1: (dict(u), known_u)}
    while True:
        ov = _ord(v)
        if ov is None or ov > known_v:
            raise Inconclusive("characteristic exponent lies beyond the known jet", b.known)
        if ov % q:
            return (ov, q)
        k = ov // q
        if k not in powers:
            prev, kp = powers[max(powers)]
            while max(powers) < k:
                j = max(powers)
                prev, kp = powers[j]
                kn = min(kp + q, known_u + j * q)
                powers[j + 1] = (_mul_known(prev, u, kn), kn)
        uk, kk = powers[k]
        c = v[ov] / lead_u ** k
        v = {e: v.get(e, 0) - c * uk.get(e, 0) for e in set(v) | set(uk)}
        v = {e: x for e, x in v.items() if not _is_zero(x)}
        known_v = min(known_v, kk)


def contact_order(b: PlaneBranch) -> int | Fraction | None:
    """Tangency order with the support ``y = 0``; ``Y ~ x^(k+1)`` means order ``k``.

    None when ``Y`` vanishes through the certified order (contact not decided).
    """
    if not any(b.Y.values()):
        return None
    b = b.content_reduced()
    ox, oy = _ord(b.X), _ord(b.Y)
    if ox is None:
        return 0
    val = Fraction(oy, ox) - 1
    if val < 0:
        return 0
    return int(val) if val.denominator == 1 else val


@dataclass(frozen=True)
class Side:
    kind: str  # "OneSide", "BothSides", "Inconclusive"
    sign: int = 0

    def __str__(self) -> str:
        if self.kind == "OneSide":
            return f"OneSide({'+' if self.sign > 0 else '-'})"
        return self.kind


def branch_side(b: PlaneBranch) -> Side:
    """Whether the branch stays on one side of the support ``y = 0``."""
    if not b.Y:
        return Side("Inconclusive")
    b = b.content_reduced()
    e = _ord(b.Y)
    c = b.Y[e]
    if isinstance(c, complex):
        if abs(c.imag) > NUMERIC_TOL * max(1.0, abs(c)):
            raise ContractViolation("side of a complex branch is undefined")
        c = c.real
    if e % 2:
        return Side("BothSides")
    return Side("OneSide", 1 if c > 0 else -1)


def plane_branch(X: dict, Y: dict, known: int) -> PlaneBranch:
    return PlaneBranch(dict(X), dict(Y), known)
