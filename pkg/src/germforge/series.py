"""Exact truncated power series in the two source variables ``xi`` and ``t``.

Exponent pairs are always ``(i, j)`` meaning ``xi**i * t**j``.  Coefficients
are :class:`gmpy2.mpq` rationals.  A series carries its truncation bound, which
is either a total-degree bound or a weighted (quasihomogeneous) one.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from gmpy2 import mpq

from .errors import ContractViolation, EmptySupportError

DEFAULT_TRUNCATION = 16


def default_truncation() -> int:
    """``GERMFORGE_MAX_JET`` when set, else ``DEFAULT_TRUNCATION``."""
    raw = os.environ.get("GERMFORGE_MAX_JET", "").strip()
    if not raw:
        return DEFAULT_TRUNCATION
    try:
        n = int(raw)
    except ValueError:
        raise ContractViolation(f"GERMFORGE_MAX_JET must be an integer, got {raw!r}") from None
    if n < 3:
        raise ContractViolation("GERMFORGE_MAX_JET must be at least 3")
    return n

Coefficient = type(mpq(0))
Exponent = tuple[int, int]


def Q(value) -> mpq:
    """Coerce ints, Fractions, strings ("3/4") and mpq values to an mpq."""
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, float):
        return mpq(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def qstr(c) -> str:
    """Rational rendered as "p/q" (or "p" for integers)."""
    return str(Q(c))


@dataclass(frozen=True)
class Weighting:
    """Weights ``a = deg(xi)`` and ``b = deg(t)``."""

    a: int
    b: int

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ContractViolation(f"weights must be positive, got ({self.a},{self.b})")
        if math.gcd(self.a, self.b) != 1:
            raise ContractViolation(f"weights ({self.a},{self.b}) are not coprime")

    def degree(self, e: Exponent) -> int:
        return self.a * e[0] + self.b * e[1]


TOTAL = Weighting(1, 1)


@dataclass(frozen=True)
class Trunc:
    """Truncation bound: terms of (weighted) degree ``<= bound`` are known.

    ``weighting is None`` means total degree.
    """

    bound: int
    weighting: Weighting | None = None

    @property
    def weights(self) -> Weighting:
        return self.weighting or TOTAL

    def degree(self, e: Exponent) -> int:
        return self.weights.degree(e)

    def admits(self, e: Exponent) -> bool:
        return self.weights.degree(e) <= self.bound

    def __str__(self) -> str:
        if self.weighting is None:
            return f"TotalDegree({self.bound})"
        return f"Weighted(({self.weighting.a},{self.weighting.b}),{self.bound})"


def TotalDegree(n: int) -> Trunc:
    return Trunc(n)


def Weighted(w: Weighting, n: int) -> Trunc:
    return Trunc(n, w)


def grlex_key(e: Exponent):
    # total degree first, then xi before t
    return (e[0] + e[1], -e[0])


def _clean(terms: Mapping[Exponent, object], trunc: Trunc) -> dict[Exponent, mpq]:
    out = {}
    for e, c in terms.items():
        if e[0] < 0 or e[1] < 0:
            raise ContractViolation(f"negative exponent {e}")
        if not trunc.admits(e):
            continue
        c = Q(c)
        if c:
            out[e] = c
    return out


class Series2:
    """Immutable truncated series ``sum c_ij xi^i t^j``."""

    __slots__ = ("_terms", "trunc", "_hash")

    def __init__(self, terms: Mapping[Exponent, object] | None = None,
                 trunc: Trunc | int = DEFAULT_TRUNCATION):
        if isinstance(trunc, int):
            trunc = Trunc(trunc)
        self.trunc = trunc
        self._terms = _clean(terms or {}, trunc)
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Exponent, mpq], trunc: Trunc) -> "Series2":
        s = cls.__new__(cls)
        s.trunc = trunc
        s._terms = terms
        s._hash = None
        return s

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, trunc: Trunc | int = DEFAULT_TRUNCATION) -> "Series2":
        return cls({}, trunc)

    @classmethod
    def const(cls, c, trunc: Trunc | int = DEFAULT_TRUNCATION) -> "Series2":
        return cls({(0, 0): c}, trunc)

    @classmethod
    def monomial(cls, i: int, j: int, c=1, trunc: Trunc | int = DEFAULT_TRUNCATION) -> "Series2":
        return cls({(i, j): c}, trunc)

    @classmethod
    def xi(cls, trunc: Trunc | int = DEFAULT_TRUNCATION) -> "Series2":
        return cls.monomial(1, 0, 1, trunc)

    @classmethod
    def t(cls, trunc: Trunc | int = DEFAULT_TRUNCATION) -> "Series2":
        return cls.monomial(0, 1, 1, trunc)

    # accessors ----------------------------------------------------------
    @property
    def terms(self) -> Mapping[Exponent, mpq]:
        return self._terms

    def items(self) -> list[tuple[Exponent, mpq]]:
        """Terms in graded-lex order (xi before t)."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))

    def __iter__(self) -> Iterator[tuple[Exponent, mpq]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coeff(self, i: int, j: int) -> mpq:
        return self._terms.get((i, j), mpq(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def constant_term(self) -> mpq:
        return self.coeff(0, 0)

    def support(self) -> list[Exponent]:
        return sorted(self._terms, key=grlex_key)

    def order(self, weighting: Weighting | None = None) -> int | None:
        """Lowest (weighted) degree of a nonzero term; None for zero."""
        if not self._terms:
            return None
        w = weighting or self.trunc.weights
        return min(w.degree(e) for e in self._terms)

    def t_order(self) -> int | None:
        """Order in t of ``self(0, t)``; None if that restriction vanishes."""
        js = [j for (i, j) in self._terms if i == 0]
        return min(js) if js else None

    def restrict_xi0(self) -> dict[int, mpq]:
        """Coefficients of ``self(0, t)`` as {power: coeff}."""
        return {j: c for (i, j), c in self._terms.items() if i == 0}

    # equality -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Series2):
            return NotImplemented
        return self.trunc == other.trunc and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.trunc, frozenset(self._terms.items())))
        return self._hash

    def same_terms(self, other: "Series2") -> bool:
        return self._terms == other._terms

    # ring operations ----------------------------------------------------
    def _check(self, other: "Series2") -> None:
        if self.trunc != other.trunc:
            raise ContractViolation(
                f"truncation mismatch: {self.trunc} vs {other.trunc}; use retruncate()")

    def _lift(self, other) -> "Series2":
        if isinstance(other, Series2):
            self._check(other)
            return other
        return Series2.const(other, self.trunc)

    def __add__(self, other) -> "Series2":
        other = self._lift(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Series2._raw(out, self.trunc)

    __radd__ = __add__

    def __neg__(self) -> "Series2":
        return Series2._raw({e: -c for e, c in self._terms.items()}, self.trunc)

    def __sub__(self, other) -> "Series2":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Series2":
        return self._lift(other) - self

    def scale(self, c) -> "Series2":
        c = Q(c)
        if not c:
            return Series2._raw({}, self.trunc)
        return Series2._raw({e: c * v for e, v in self._terms.items()}, self.trunc)

    def __mul__(self, other) -> "Series2":
        if not isinstance(other, Series2):
            return self.scale(other)
        self._check(other)
        w = self.trunc.weights
        bound = self.trunc.bound
        b_items = sorted(((w.degree(e), e, c) for e, c in other._terms.items()))
        out: dict[Exponent, mpq] = {}
        for (i1, j1), c1 in self._terms.items():
            room = bound - w.degree((i1, j1))
            if room < 0:
                continue
            for d2, (i2, j2), c2 in b_items:
                if d2 > room:
                    break
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + c1 * c2
        return Series2._raw({e: c for e, c in out.items() if c}, self.trunc)

    def __rmul__(self, other) -> "Series2":
        return self.scale(other)

    def __pow__(self, n: int) -> "Series2":
        if not isinstance(n, int) or n < 0:
            raise ContractViolation("only natural powers are supported")
        result = Series2.const(1, self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "Series2":
        """Multiplicative inverse of a unit (nonzero constant term)."""
        c0 = self.constant_term()
        if not c0:
            raise ContractViolation("only units can be inverted")
        # 1/(c0(1+r)) = (1/c0) * sum (-r)^k; r has positive order
        r = self.scale(1 / c0) - 1
        result = Series2.const(1, self.trunc)
        power = Series2.const(1, self.trunc)
        mo = r.order()
        steps = 0 if mo is None else self.trunc.bound // mo
        for _ in range(steps):
            power = -(power * r)
            if power.is_zero():
                break
            result = result + power
        return result.scale(1 / c0)

    # calculus and composition --------------------------------------------
    def diff(self, var: str) -> "Series2":
        """Formal partial derivative; bound drops by the variable's weight."""
        w = self.trunc.weights
        if var in ("xi", "x", "ξ"):
            step, idx = w.a, 0
        elif var == "t":
            step, idx = w.b, 1
        else:
            raise ContractViolation(f"unknown variable {var!r}")
        trunc = Trunc(self.trunc.bound - step, self.trunc.weighting)
        out = {}
        for (i, j), c in self._terms.items():
            e = (i, j)
            if e[idx] == 0:
                continue
            ne = (i - 1, j) if idx == 0 else (i, j - 1)
            out[ne] = c * e[idx]
        return Series2(out, trunc)

    def substitute(self, u: "Series2", v: "Series2") -> "Series2":
        """Composition ``self(u, v)``, truncated to the shared bound."""
        self._check(u)
        self._check(v)
        if u.constant_term() or v.constant_term():
            raise ContractViolation("substituted series must have zero constant term")
        w = self.trunc.weights
        if self.trunc.weighting is not None:
            ou, ov = u.order(), v.order()
            if (ou is not None and ou < w.a) or (ov is not None and ov < w.b):
                raise ContractViolation(
                    "substitution lowers the weighted filtration; truncated jets do not determine it")
        if not self._terms:
            return self
        max_i = max(i for i, _ in self._terms)
        max_j = max(j for _, j in self._terms)
        vpow = [Series2.const(1, self.trunc)]
        for _ in range(max_j):
            vpow.append(vpow[-1] * v)
        rows: dict[int, dict[int, mpq]] = {}
        for (i, j), c in self._terms.items():
            rows.setdefault(i, {})[j] = c

        def row_series(i: int) -> Series2:
            acc: dict[Exponent, mpq] = {}
            for j, c in rows.get(i, {}).items():
                for e, cv in vpow[j]._terms.items():
                    acc[e] = acc.get(e, 0) + c * cv
            return Series2._raw({e: c for e, c in acc.items() if c}, self.trunc)

        result = row_series(max_i)
        for i in range(max_i - 1, -1, -1):
            result = result * u + row_series(i)
        return result

    def compose(self, u: "Series2", v: "Series2") -> "Series2":
        return self.substitute(u, v)

    def weighted_jet(self, w: Weighting, d: int) -> "Series2":
        """Terms with ``a*i + b*j <= d``; the truncation bound is kept."""
        if d < 0:
            raise ContractViolation("jet degree must be >= 0")
        return Series2._raw({e: c for e, c in self._terms.items() if w.degree(e) <= d},
                            self.trunc)

    def graded_part(self, w: Weighting, d: int) -> "Series2":
        return Series2._raw({e: c for e, c in self._terms.items() if w.degree(e) == d},
                            self.trunc)

    def retruncate(self, trunc: Trunc | int) -> "Series2":
        """Explicit conversion to another truncation bound.

        Raising the bound is only legitimate when the caller knows the
        series is a polynomial; that is the caller's responsibility.
        """
        if isinstance(trunc, int):
            trunc = Trunc(trunc)
        return Series2({e: c for e, c in self._terms.items()}, trunc)

    def map_coeffs(self, fn) -> "Series2":
        return Series2({e: fn(c) for e, c in self._terms.items()}, self.trunc)

    def divide_by_t(self, k: int = 1) -> "Series2":
        """Exact quotient by ``t**k``; raises if not divisible."""
        if any(j < k for (_, j) in self._terms):
            raise ContractViolation(f"series is not divisible by t^{k}")
        w = self.trunc.weights
        trunc = Trunc(self.trunc.bound - k * w.b, self.trunc.weighting)
        return Series2({(i, j - k): c for (i, j), c in self._terms.items()}, trunc)

    def divisible_by_t(self, k: int = 1) -> bool:
        return all(j >= k for (_, j) in self._terms)

    # numeric evaluation ---------------------------------------------------
    def evaluate(self, xi, t):
        """Float (or numpy-array) evaluation, for plotting only."""
        total = 0.0
        for (i, j), c in self._terms.items():
            total = total + float(c) * xi ** i * t ** j
        return total

    def evaluate_exact(self, xi, t) -> mpq:
        xi, t = Q(xi), Q(t)
        return sum((c * xi ** i * t ** j for (i, j), c in self._terms.items()), mpq(0))

    # text ---------------------------------------------------------------
    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Series2({render(self)!r}, {self.trunc})"


def monomial_text(i: int, j: int) -> str:
    parts = []
    if j:
        parts.append("t" if j == 1 else f"t^{j}")
    if i:
        parts.append("xi" if i == 1 else f"xi^{i}")
    return "*".join(parts)


def render_terms(items: Iterable[tuple[Exponent, object]]) -> str:
    """Canonical text: graded-lex order, e.g. ``t^2*xi + t^4 - 1/2*t^5``."""
    chunks = []
    for (i, j), c in items:
        c = Q(c)
        neg = c < 0
        a = -c if neg else c
        mono = monomial_text(i, j)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not chunks:
            chunks.append(f"-{body}" if neg else body)
        else:
            chunks.append(f" - {body}" if neg else f" + {body}")
    return "".join(chunks) if chunks else "0"


def render(s: Series2) -> str:
    return render_terms(s.items())


# ---------------------------------------------------------------------------
# free-function facade

def add(a: Series2, b: Series2) -> Series2:
    return a + b


def mul(a: Series2, b: Series2) -> Series2:
    return a * b


def diff(a: Series2, var: str) -> Series2:
    return a.diff(var)


def substitute(a: Series2, u: Series2, v: Series2) -> Series2:
    return a.substitute(u, v)


def weighted_jet(a: Series2, w: Weighting, d: int) -> Series2:
    return a.weighted_jet(w, d)


def retruncate(a: Series2, trunc: Trunc | int) -> Series2:
    return a.retruncate(trunc)


def common_trunc(*series: Series2) -> Trunc:
    """Smallest bound among series sharing one weighting."""
    ws = {s.trunc.weighting for s in series}
    if len(ws) != 1:
        raise ContractViolation("series use different weightings")
    return Trunc(min(s.trunc.bound for s in series), ws.pop())


def align(*series: Series2) -> list[Series2]:
    """Retruncate every series down to the common (lowest) bound."""
    tr = common_trunc(*series)
    return [s if s.trunc == tr else s.retruncate(tr) for s in series]


# ---------------------------------------------------------------------------
# Newton diagram

@dataclass(frozen=True)
class NewtonSupport:
    """Support points and the lower-left (Newton) hull.

    Points are ``(i, j)`` = (xi-exponent, t-exponent).  Vertices run from the
    leftmost point (smallest ``i``) to the lowest one (smallest ``j``);
    segments are listed left to right, i.e. steepest first.
    """

    points: tuple[Exponent, ...]
    vertices: tuple[Exponent, ...]

    @property
    def segments(self) -> tuple[tuple[Exponent, Exponent], ...]:
        v = self.vertices
        return tuple((v[k], v[k + 1]) for k in range(len(v) - 1))


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_left_hull(points: Iterable[Exponent]) -> tuple[Exponent, ...]:
    best: dict[int, int] = {}
    for i, j in points:
        if i not in best or j < best[i]:
            best[i] = j
    pts = sorted(best.items())
    hull: list[Exponent] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    # keep the strictly descending part (faces visible from the origin)
    out = [hull[0]]
    for p in hull[1:]:
        if p[1] < out[-1][1]:
            out.append(p)
        else:
            break
    return tuple(out)


def newton_support(a: Series2) -> NewtonSupport:
    if a.is_zero():
        raise EmptySupportError("Newton support of the zero series")
    pts = tuple(sorted(a.terms))
    return NewtonSupport(points=pts, vertices=lower_left_hull(pts))


def from_poly(terms: Mapping[Exponent, object], trunc: Trunc | int = DEFAULT_TRUNCATION) -> Series2:
    return Series2(terms, trunc)


__all__ = [
    "Q", "qstr", "Coefficient", "Weighting", "Trunc", "TotalDegree", "Weighted", "Series2",
    "NewtonSupport", "newton_support", "render", "render_terms", "add", "mul", "diff",
    "substitute", "weighted_jet", "retruncate", "align", "common_trunc", "DEFAULT_TRUNCATION",
    "lower_left_hull", "grlex_key",
]
