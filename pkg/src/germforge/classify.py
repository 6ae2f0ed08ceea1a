"""Decision procedure: tangential family germ -> singularity class with invariants."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .catalog import SingularityClass, adjacency, adjacency_closure, parse_class  # noqa: F401
from .envelope import EnvelopeReport, envelope_branches
from .errors import ContractViolation, Inconclusive, InternalConsistencyError
from .germ import MapGerm, PrenormalForm, TangentialFamily, criminant_equation, to_prenormal
from .reduction import GradedReduction, graded_reduce
from .series import Series2, Weighting, qstr
from .tanspace import VecMono

S1_WEIGHTS = Weighting(2, 1)
S2_WEIGHTS = Weighting(3, 1)


@dataclass
class CrossRatio:
    value: complex
    degenerate: bool = False
    directions: list = field(default_factory=list)

    def modulus_a(self) -> float:
        """``|a|`` of the model germ with the same cross ratio."""
        r = cmath.sqrt(self.value)
        return abs((r + 1 / r) / 2)


@dataclass
class S1Result:
    n: int | None  # None: all b_i vanish through the jet
    b: list[mpq]
    envelopeN: int | None
    reductionN: int | None

    @property
    def crossChecked(self) -> bool:
        return self.envelopeN is not None and self.reductionN is not None


@dataclass
class S2Result:
    cls: SingularityClass
    c6: mpq
    c9: mpq


@dataclass
class ClassificationReport:
    cls: SingularityClass
    alpha: mpq
    k: tuple
    certifiedToJet: int
    b: list = field(default_factory=list)
    crossRatio: CrossRatio | None = None
    envelope: EnvelopeReport | None = None
    moduli: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def envelopeOrders(self) -> list[dict]:
        if self.envelope is None:
            return []
        return [{"order": list(b.order) if b.order else None,
                 "contact": _contact_json(b.contact),
                 "side": str(b.side) if b.side else None} for b in self.envelope.otherBranches]

    def to_json(self) -> dict:
        cr = None
        if self.crossRatio is not None:
            cr = [self.crossRatio.value.real + 0.0, self.crossRatio.value.imag + 0.0]
        return {
            "class": self.cls.name,
            "codim": _num(self.cls.codim),
            "tangCodim": _num(self.cls.tangCodim),
            "simple": self.cls.simple,
            "alpha": qstr(self.alpha),
            "k": [qstr(c) for c in self.k],
            "b": [qstr(c) for c in self.b],
            "crossRatio": cr,
            "crossRatioDegenerate": self.crossRatio.degenerate if self.crossRatio else None,
            "envelopeOrders": self.envelopeOrders,
            "certifiedToJet": self.certifiedToJet,
            "moduli": self.moduli,
            "notes": self.notes,
        }


def _num(v):
    return "inf" if v == math.inf else v


def _contact_json(c):
    return str(c) if c is not None and not isinstance(c, int) else c


# ---------------------------------------------------------------------------

def _as_prenormal(tf) -> PrenormalForm:
    if isinstance(tf, PrenormalForm):
        return tf
    if isinstance(tf, (TangentialFamily, MapGerm)):
        return to_prenormal(tf)
    raise ContractViolation("expected a tangential family, map germ or prenormal form")


def s_index(pf: PrenormalForm) -> int | None:
    """``n`` of an S-type germ: ``phi(-t, t)`` vanishes to order exactly ``n + 3``."""
    psi = pf.graph_phi()
    col = psi.restrict_xi0()
    orders = [j for j, c in col.items() if c]
    if not orders:
        return None
    return min(orders) - 3


def _rescaled_graph(pf: PrenormalForm, deg_t: int) -> tuple[MapGerm, mpq, mpq]:
    """``(xi, psi)`` rescaled so that its initial part is ``t^deg_t + t^2 xi``."""
    psi = pf.graph_phi()
    tr = psi.trunc
    c1, c2 = psi.coeff(1, 2), psi.coeff(0, deg_t)
    if not c1 or not c2:
        raise ContractViolation("initial part is not of the expected shape")
    a, nu = c2 / c1, 1 / c2
    scaled = psi.substitute(Series2.xi(tr).scale(a), Series2.t(tr)).scale(nu)
    return MapGerm(Series2.xi(tr), scaled), a, nu


def s1_reduction(pf: PrenormalForm) -> GradedReduction:
    f, _, _ = _rescaled_graph(pf, 4)
    tr = f.trunc
    f0 = MapGerm(Series2.xi(tr), Series2({(0, 4): 1, (1, 2): 1}, tr))
    return graded_reduce(f, f0, S1_WEIGHTS, (2, 4), tr.bound - 4)


def s1_subindex(pf: PrenormalForm, envelope: EnvelopeReport | None = None) -> S1Result:
    """Subindex of an S1 germ by the envelope cusp order, cross-checked by the
    graded reduction to ``(xi, t^4 + t^2 xi) + sum b_i (0, t^(2i+3))``."""
    red = s1_reduction(pf)
    b = []
    n_red = None
    for k in sorted(red.residuals):
        res = red.residuals[k]
        expected = VecMono(1, 0, 4 + k)
        for m, c in res:
            if m != expected:
                raise InternalConsistencyError(f"unexpected residual {m} at weighted degree {k}")
        if k % 2 == 1:
            c = red.coefficient(k, expected)
            b.append(c)
            if c and n_red is None:
                n_red = (k + 1) // 2
    if envelope is None:
        envelope = envelope_branches(pf)
    n_env = None
    second = envelope.otherBranches
    if len(second) == 1 and second[0].order is not None:
        p, q = second[0].order
        if q != 2 or p % 2 == 0:
            raise InternalConsistencyError(f"S1 envelope branch has order {p}/{q}")
        n_env = (p - 3) // 2
    if n_env is not None and n_red is not None and n_env != n_red:
        raise InternalConsistencyError(f"S1 subindex: envelope gives {n_env}, reduction gives {n_red}")
    n = n_env if n_env is not None else n_red
    if n is None and any(b):
        raise InternalConsistencyError("reduction coefficients and subindex disagree")
    return S1Result(n, b, n_env, n_red)


def s2_suborbit(pf: PrenormalForm) -> S2Result:
    """S2,2 / S2,3(+-) / S2,4 from the graded reduction over ``(xi, t^5 + t^2 xi)``."""
    f, _, _ = _rescaled_graph(pf, 5)
    tr = f.trunc
    if tr.bound < 9:
        raise Inconclusive("the S2 suborbit needs the 9-jet", tr.bound)
    f0 = MapGerm(Series2.xi(tr), Series2({(0, 5): 1, (1, 2): 1}, tr))
    red = graded_reduce(f, f0, S2_WEIGHTS, (3, 5), 4)
    if red.reached < 4:
        raise Inconclusive("the S2 suborbit needs weighted degree 9", tr.bound)
    allowed = {1: VecMono(1, 0, 6), 4: VecMono(1, 0, 9)}
    for k, res in red.residuals.items():
        for m, c in res:
            if allowed.get(k) != m:
                raise InternalConsistencyError(f"unexpected S2 residual {m} at weighted degree {k}")
    c6 = red.coefficient(1, allowed[1])
    c9 = red.coefficient(4, allowed[4])
    if c6:
        cls = SingularityClass("S2_2")
    elif c9:
        cls = SingularityClass("S2_3", sign=1 if c9 > 0 else -1)
    else:
        cls = SingularityClass("S2_4")
    return S2Result(cls, c6, c9)


# ---------------------------------------------------------------------------
# cross ratio of U-type germs

def _lowest_form(g: Series2) -> tuple[int, dict[int, mpq]]:
    d = g.order()
    return d, {j: c for (i, j), c in g.terms.items() if i + j == d}


def _det(u, v) -> complex:
    return u[0] * v[1] - u[1] * v[0]


def _cr(z1, z2, z3, z4) -> complex:
    return (_det(z1, z3) * _det(z2, z4)) / (_det(z1, z4) * _det(z2, z3))


def cross_ratio(pf: PrenormalForm) -> CrossRatio | None:
    """Cross ratio of (kernel of df, support, the two other criminant tangents).

    Points are directions ``[dxi : dt]`` in the source.  Swapping the last two
    points inverts the value; the canonical value is the one with modulus
    above 1, or with nonnegative imaginary part on the unit circle.
    Returns None when the criminant's tangent cone is not a cubic.
    """
    g, h = criminant_equation(pf)
    d, form = _lowest_form(g)
    if d != 3:
        return None
    # form = sum c_j xi^(3-j) t^j = t * (A xi^2 + B xi t + C t^2)
    A, B, C = form.get(1, mpq(0)), form.get(2, mpq(0)), form.get(3, mpq(0))
    if form.get(0):
        raise ContractViolation("criminant does not contain the support")
    kernel = (1.0, -1.0)
    support = (1.0, 0.0)
    if C:
        disc = B * B - 4 * A * C  # exact: a zero discriminant is a repeated direction
        if disc == 0:
            r = complex(-B / (2 * C))
            dirs = [(1.0 + 0j, r), (1.0 + 0j, r)]
        else:
            sq = cmath.sqrt(complex(disc))
            dirs = [(1.0 + 0j, (-float(B) + sq) / (2 * float(C))),
                    (1.0 + 0j, (-float(B) - sq) / (2 * float(C)))]
    elif B:
        dirs = [(1.0 + 0j, complex(-float(A) / float(B))), (0j, 1.0 + 0j)]
    elif A:
        dirs = [(0j, 1.0 + 0j), (0j, 1.0 + 0j)]
    else:
        return None
    z3, z4 = dirs
    degenerate = abs(_det(z3, z4)) < 1e-12 or any(abs(_det(z, kernel)) < 1e-12 or abs(_det(z, support)) < 1e-12
                                                 for z in dirs)
    if degenerate:
        return CrossRatio(1 + 0j, True, [kernel, support, z3, z4])
    lam = _cr(kernel, support, z3, z4)
    if abs(lam) < 1 - 1e-12 or (abs(abs(lam) - 1) <= 1e-12 and lam.imag < 0):
        lam = 1 / lam
    return CrossRatio(complex(lam), False, [kernel, support, z3, z4])


# ---------------------------------------------------------------------------

def classify(tf, maxJet: int | None = None, withEnvelope: bool = True) -> ClassificationReport:
    pf = _as_prenormal(tf)
    bound = pf.phi.trunc.bound
    if maxJet is not None:
        if maxJet < 3:
            raise ContractViolation("maxJet must be at least 3")
        if maxJet < bound:
            pf = PrenormalForm(pf.phi.retruncate(maxJet))
            bound = maxJet
    if bound < 3:
        raise Inconclusive("classification needs at least the 3-jet", bound)
    alpha, k0, k1 = pf.alpha, pf.kcoef(0), pf.kcoef(1)
    notes: list[str] = []
    env = envelope_branches(pf) if withEnvelope and k0 == 0 else None
    C = SingularityClass
    report_b: list = []
    cr = None
    moduli = None
    if k0:
        cls = C("I")
    elif k1 and k1 != alpha:
        cls = C("II")
    elif alpha and alpha == k1:
        n = s_index(pf)
        if n is None:
            cls = C("S_INF")
            notes.append(f"phi(-t,t) vanishes through jet order {bound}")
        else:
            _check_s_index(n, env)
            if n == 1:
                res = s1_subindex(pf, env)
                report_b = res.b
                cls = C("S1", res.n) if res.n is not None else C("S1_INF")
                if res.n is not None and not res.crossChecked:
                    notes.append("S1 subindex decided by one route only at this jet")
                if res.n is None:
                    notes.append(f"all b_i vanish through jet order {bound}")
            elif n == 2:
                cls = s2_suborbit(pf).cls
            else:
                cls = C("S_ge3", n)
    elif alpha and not k1:
        m = None
        for j in range(2, len(pf.k)):
            if pf.k[j]:
                m = j - 1
                break
        if m is None:
            cls = C("T_INF")
            notes.append(f"k_i vanish through jet order {bound}")
        else:
            cls = C("T", m)
            _check_t_index(m, env)
    else:
        cls = C("U")
        cr = cross_ratio(pf)
        if cr is not None and not cr.degenerate:
            moduli = {"a": cr.modulus_a()}
    return ClassificationReport(cls, alpha, pf.k, bound, report_b, cr, env, moduli, notes)


def _check_s_index(n: int, env: EnvelopeReport | None) -> None:
    """The non-support criminant branch is tangent to the kernel direction to order n."""
    if env is None or len(env.otherBranches) != 1:
        return
    plane = env.otherBranches[0].plane
    if not plane.X:
        return
    ox = min(plane.X)
    if ox <= plane.known and ox - 1 != n:
        raise InternalConsistencyError(f"S index {n} but criminant tangency order {ox - 1}")


def _check_t_index(m: int, env: EnvelopeReport | None) -> None:
    """The two criminant branches are tangent to order m."""
    if env is None or len(env.otherBranches) != 1:
        return
    br = env.otherBranches[0].criminant
    if br is None or not br.coeffs:
        return
    lead = br.coeffs[0][0]
    if lead < br.truncOrder and lead != m + 1:
        raise InternalConsistencyError(f"T index {m} but criminant branches meet to order {lead - 1}")
