"""Map germs of the plane, tangential-family validation and prenormal forms."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import (ContractViolation, NotImmersedFiber, SingularSupport, TangencyViolated,
                     TruncationTooLow)
from .series import Q, Series2, Trunc, align, qstr, render


@dataclass(frozen=True)
class MapGerm:
    """``(xi, t) -> (p, q)`` with target coordinates ``(x, y)``."""

    p: Series2
    q: Series2

    def __post_init__(self):
        if self.p.trunc != self.q.trunc:
            raise ContractViolation("map germ components must share a truncation bound")
        if self.p.constant_term() or self.q.constant_term():
            raise ContractViolation("map germ must send the origin to the origin")

    @property
    def trunc(self) -> Trunc:
        return self.p.trunc

    def compose_right(self, u: Series2, v: Series2) -> "MapGerm":
        """Source change: ``f(u(xi,t), v(xi,t))``."""
        return MapGerm(self.p.substitute(u, v), self.q.substitute(u, v))

    def compose_left(self, a: Series2, b: Series2) -> "MapGerm":
        """Target change ``(x, y) -> (a(x,y), b(x,y))``; ``a, b`` use the xi/t slots for x/y."""
        return MapGerm(a.substitute(self.p, self.q), b.substitute(self.p, self.q))

    def retruncate(self, trunc: Trunc | int) -> "MapGerm":
        return MapGerm(self.p.retruncate(trunc), self.q.retruncate(trunc))

    def text(self) -> str:
        return f"{render(self.p)} ; {render(self.q)}"

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class TangentialFamily:
    f: MapGerm
    validatedTo: int


@dataclass(frozen=True)
class PrenormalForm:
    """Presentation ``(xi + t, phi)`` with support ``y = 0``.

    ``alpha`` is the coefficient of ``t^3`` and ``k[i]`` the coefficient of
    ``t^2 xi^i`` in ``phi``.
    """

    phi: Series2
    alpha: mpq = field(default=None)
    k: tuple = field(default=None)

    def __post_init__(self):
        if not self.phi.divisible_by_t(2):
            raise ContractViolation("prenormal phi must be divisible by t^2")
        alpha = self.phi.coeff(0, 3)
        k = []
        while self.phi.trunc.admits((len(k), 2)):
            k.append(self.phi.coeff(len(k), 2))
        k = tuple(k)
        if self.alpha is None:
            object.__setattr__(self, "alpha", alpha)
        elif Q(self.alpha) != alpha:
            raise ContractViolation("cached alpha does not match phi")
        if self.k is None:
            object.__setattr__(self, "k", k)
        elif tuple(Q(c) for c in self.k) != k:
            raise ContractViolation("cached k does not match phi")

    @property
    def trunc(self) -> Trunc:
        return self.phi.trunc

    def kcoef(self, i: int) -> mpq:
        return self.k[i] if i < len(self.k) else mpq(0)

    def as_map(self) -> MapGerm:
        tr = self.phi.trunc
        return MapGerm(Series2({(1, 0): 1, (0, 1): 1}, tr), self.phi)

    def graph_phi(self) -> Series2:
        """``phi(xi - t, t)``: the presentation ``(xi, psi)`` used in the normal-form proofs."""
        tr = self.phi.trunc
        return self.phi.substitute(Series2({(1, 0): 1, (0, 1): -1}, tr), Series2.t(tr))

    def to_json(self) -> dict:
        return {
            "phi": render(self.phi),
            "alpha": qstr(self.alpha),
            "k": [qstr(c) for c in self.k],
            "truncation": self.phi.trunc.bound,
        }


def family_from_graph(psi: Series2) -> MapGerm:
    """Tangential presentation ``(xi + t, psi(xi + t, t))`` of the germ ``(xi, psi)``."""
    tr = psi.trunc
    phi = psi.substitute(Series2({(1, 0): 1, (0, 1): 1}, tr), Series2.t(tr))
    return MapGerm(Series2({(1, 0): 1, (0, 1): 1}, tr), phi)


# ---------------------------------------------------------------------------
# helpers on univariate series (stored with t-exponent 0)

def _restrict_t0(s: Series2) -> Series2:
    return Series2({(i, 0): c for (i, j), c in s.terms.items() if j == 0}, s.trunc)


def _coeffs_in_xi(s: Series2, upto: int) -> list[mpq]:
    return [s.coeff(i, 0) for i in range(upto + 1)]


def invert_univariate(x: Series2) -> Series2:
    """Compositional inverse of ``x(xi)`` with ``x(0)=0, x'(0)!=0``."""
    tr = x.trunc
    c1 = x.coeff(1, 0)
    if not c1:
        raise TruncationTooLow("support parameter is not invertible")
    zero = Series2.zero(tr)
    xi = Series2.xi(tr)
    a = xi.scale(1 / c1)
    dx = x.diff("xi").retruncate(tr)
    for _ in range(2 * tr.bound + 4):
        err = x.substitute(a, zero) - xi
        if err.is_zero():
            return a
        a = a - err * dx.substitute(a, zero).inverse()
    raise TruncationTooLow("inverse series did not converge")


def solve_fiber(r: Series2) -> Series2:
    """Solve ``r(xi, T) = t`` for ``T(xi, t)``, given ``r(xi, 0) = 0`` and ``r_t(0,0) != 0``."""
    tr = r.trunc
    c = r.coeff(0, 1)
    if not c:
        raise TruncationTooLow("fiber parameter is not invertible")
    xi, t = Series2.xi(tr), Series2.t(tr)
    rt = r.diff("t").retruncate(tr)
    b = t.scale(1 / c)
    for _ in range(2 * tr.bound + 4):
        err = r.substitute(xi, b) - t
        if err.is_zero():
            return b
        b = b - err * rt.substitute(xi, b).inverse()
    raise TruncationTooLow("fiber inverse did not converge")


# ---------------------------------------------------------------------------

def validate_tangential(f: MapGerm, order: int | None = None) -> TangentialFamily:
    """Check the tangential-family axioms through xi-order ``order``."""
    known = f.trunc.bound - 1
    if order is None:
        order = known
    if order < 2 and known >= 2:
        raise ContractViolation("validation order must be >= 2")
    if order > known:
        raise ContractViolation(f"validation order {order} exceeds the truncation ({known})")
    p, q = f.p, f.q
    sx, sy = p.coeff(1, 0), q.coeff(1, 0)
    if not sx and not sy:
        raise SingularSupport("support curve xi -> f(xi, 0) is not immersed")
    fx, fy = p.coeff(0, 1), q.coeff(0, 1)
    if not fx and not fy:
        # direction of the family curve at the base point: first nonvanishing t-derivative
        for j in range(2, f.trunc.bound + 1):
            dx, dy = p.coeff(0, j), q.coeff(0, j)
            if dx or dy:
                if dx * sy - dy * sx:
                    raise TangencyViolated(0)
                break
        raise NotImmersedFiber("family curve t -> f(0, t) is not immersed at the base point")
    # wedge(d/dt f(xi,0), d/dxi f(xi,0)) as a series in xi
    pt = _coeffs_in_xi(p.diff("t"), order)
    qt = _coeffs_in_xi(q.diff("t"), order)
    ps = [p.coeff(i + 1, 0) * (i + 1) for i in range(order + 1)]
    qs = [q.coeff(i + 1, 0) * (i + 1) for i in range(order + 1)]
    for n in range(order + 1):
        w = sum(pt[i] * qs[n - i] - qt[i] * ps[n - i] for i in range(n + 1))
        if w:
            raise TangencyViolated(n)
    return TangentialFamily(f, order)


def to_prenormal(tf: TangentialFamily | MapGerm) -> PrenormalForm:
    """Reduce a validated family to a deterministic prenormal form ``(xi + t, phi)``."""
    if isinstance(tf, MapGerm):
        tf = validate_tangential(tf)
    f = tf.f
    tr = f.trunc
    if tr.weighting is not None:
        raise ContractViolation("prenormal reduction expects a total-degree truncation")
    if tr.bound < 3:
        raise TruncationTooLow("need at least the 3-jet for a prenormal form")
    zero = Series2.zero(tr)
    xi, t = Series2.xi(tr), Series2.t(tr)
    # (i) rotate the support tangent onto the x-axis
    v1, v2 = f.p.coeff(1, 0), f.q.coeff(1, 0)
    if v2 == 0 and v1 == 1:
        p1, q1 = f.p, f.q
    else:
        p1 = f.p.scale(v1) + f.q.scale(v2)
        q1 = f.q.scale(v1) - f.p.scale(v2)
    # (ii) straighten the support: y -> y - s(x) with s the support's graph function
    big_x = _restrict_t0(p1)
    big_y = _restrict_t0(q1)
    a = invert_univariate(big_x)
    s = big_y.substitute(a, zero)
    q2 = q1 - s.substitute(p1, zero)
    # (iii) right change (xi, t) -> (X(xi), p1 - X(xi)) making the first component xi + t
    r = p1.substitute(a, t) - xi
    b = solve_fiber(r)
    phi = q2.substitute(a, b)
    if any(j < 2 for (_, j) in phi.terms):
        bad = min(i for (i, j) in phi.terms if j < 2)
        raise TangencyViolated(bad, "prenormal phi is not divisible by t^2")
    return PrenormalForm(phi)


def jacobian_det(f: MapGerm) -> Series2:
    px, pt, qx, qt = align(f.p.diff("xi"), f.p.diff("t"), f.q.diff("xi"), f.q.diff("t"))
    return px * qt - pt * qx


def criminant_equation(pf: PrenormalForm) -> tuple[Series2, Series2]:
    """``g = phi_t - phi_xi`` and its cofactor ``h`` with ``g = t * h``."""
    phi_t, phi_xi = align(pf.phi.diff("t"), pf.phi.diff("xi"))
    g = phi_t - phi_xi
    return g, g.divide_by_t(1)


def prenormal_from_text(phi_text: str, trunc: int = 16) -> PrenormalForm:
    from .parser import parse_series
    return PrenormalForm(parse_series(phi_text, trunc))
