"""Miniversal tangential deformations, swallowtail discriminants and
bifurcation grids."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .catalog import SingularityClass, parse_class, table_directions
from .classify import classify
from .envelope import trace_numeric
from .errors import ContractViolation, GermforgeError, Inconclusive
from .germ import PrenormalForm
from .parser import parse_series
from .series import Q, Series2, qstr


@dataclass(frozen=True)
class DeformationSpec:
    forClass: SingularityClass
    directions: tuple[str, ...]

    @property
    def paramNames(self) -> tuple[str, ...]:
        return tuple(f"l{i + 1}" for i in range(len(self.directions)))

    @property
    def tau(self) -> int:
        return len(self.directions)

    def series(self, trunc) -> list[Series2]:
        return [parse_series(e, trunc) for e in self.directions]

    def to_json(self) -> dict:
        return {"class": self.forClass.name, "directions": list(self.directions),
                "parameters": list(self.paramNames)}


def miniversal_spec(cls) -> DeformationSpec:
    if not isinstance(cls, SingularityClass):
        cls = parse_class(cls)
    return DeformationSpec(cls, tuple(table_directions(cls)))


def apply(pf: PrenormalForm, spec: DeformationSpec, lam) -> PrenormalForm:
    """``phi + sum lam_i e_i``, revalidated as a prenormal form."""
    lam = list(lam)
    if len(lam) != spec.tau:
        raise ContractViolation(f"expected {spec.tau} parameters, got {len(lam)}")
    tr = pf.phi.trunc
    phi = pf.phi
    for e, c in zip(spec.series(tr), lam):
        if not e.divisible_by_t(2):
            raise ContractViolation(f"deformation direction {e} is not divisible by t^2")
        phi = phi + e.scale(Q(c))
    return PrenormalForm(phi)


def parse_assignments(text: str, spec: DeformationSpec) -> list[mpq]:
    """``"l1=1/2,l3=-1"`` -> full parameter vector (missing entries are 0)."""
    vals = [mpq(0)] * spec.tau
    if not text.strip():
        return vals
    for part in text.split(","):
        if "=" not in part:
            raise ContractViolation(f"bad deformation assignment {part!r}")
        name, value = (s.strip() for s in part.split("=", 1))
        if name not in spec.paramNames:
            raise ContractViolation(f"unknown parameter {name!r}; expected one of {', '.join(spec.paramNames)}")
        vals[spec.paramNames.index(name)] = Q(Fraction(value))
    return vals


# ---------------------------------------------------------------------------
# T_n swallowtails

@dataclass(frozen=True)
class QFamily:
    """``Q(x) = x^(n+1) + l_n x^(n-1) + ... + l_1``."""

    n: int
    lam: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ContractViolation("n must be >= 1")
        if len(self.lam) != self.n:
            raise ContractViolation(f"expected {self.n} parameters")

    def coefficients(self) -> list:
        """Ascending coefficients ``[c_0, ..., c_(n+1)]``."""
        return list(self.lam) + [0, 1]

    def derivative(self) -> list:
        c = self.coefficients()
        return [k * c[k] for k in range(1, len(c))]


def _sylvester(p: list, q: list) -> list[list]:
    """Sylvester matrix of two polynomials given by ascending coefficients."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    rows = []
    pd, qd = p[::-1], q[::-1]
    for r in range(n):
        rows.append([0] * r + pd + [0] * (size - m - 1 - r))
    for r in range(m):
        rows.append([0] * r + qd + [0] * (size - n - 1 - r))
    return rows


def _bareiss_det(a: list[list]):
    """Fraction-free determinant; exact over integers and rationals."""
    a = [row[:] for row in a]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def q_discriminant(qf: QFamily):
    """``resultant(Q, Q')`` of the monic ``Q``.

    Exact (``mpq``) for rational parameters, float otherwise.  This equals
    ``(-1)^(d(d-1)/2)`` times the classical discriminant, ``d = n + 1``.
    """
    exact = all(isinstance(v, (int, Fraction)) or type(v).__name__ == "mpq" for v in qf.lam)
    if exact:
        p = [Q(c) for c in qf.coefficients()]
        q = [Q(c) for c in qf.derivative()]
        return mpq(_bareiss_det(_sylvester(p, q)))
    p = [float(c) for c in qf.coefficients()]
    q = [float(c) for c in qf.derivative()]
    return float(np.linalg.det(np.array(_sylvester(p, q), dtype=float)))


def discriminant_samples(n: int, axes: list[list]) -> list[tuple[tuple, object]]:
    """``q_discriminant`` on the product grid of ``axes`` (one axis per parameter)."""
    if len(axes) != n:
        raise ContractViolation(f"need {n} axes")
    return [(pt, q_discriminant(QFamily(n, tuple(pt)))) for pt in itertools.product(*axes)]


# ---------------------------------------------------------------------------
# bifurcation grids

def axis(start, stop, count: int) -> list[mpq]:
    """``count`` equally spaced exact rationals from ``start`` to ``stop``."""
    a, b = Q(Fraction(str(start))), Q(Fraction(str(stop)))
    if count < 1:
        raise ContractViolation("axis needs at least one point")
    if count == 1:
        return [a]
    return [a + (b - a) * k / (count - 1) for k in range(count)]


def parse_grid(text: str, tau: int) -> list[list[mpq]]:
    """``"l1=-1:1:5,l2=0:1:3"`` -> axes; omitted parameters are fixed at 0."""
    axes: list[list[mpq] | None] = [None] * tau
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise ContractViolation(f"bad grid axis {part!r}; use name=start:stop:count")
        name, rng = part.split("=", 1)
        name = name.strip()
        if not name.startswith("l") or not name[1:].isdigit() or not 1 <= int(name[1:]) <= tau:
            raise ContractViolation(f"unknown parameter {name!r}")
        bits = rng.split(":")
        if len(bits) != 3:
            raise ContractViolation(f"bad grid axis {part!r}; use name=start:stop:count")
        axes[int(name[1:]) - 1] = axis(bits[0], bits[1], int(bits[2]))
    return [a if a is not None else [mpq(0)] for a in axes]


@dataclass
class GridPoint:
    lam: tuple
    cls: SingularityClass | None
    certifiedToJet: int
    error: str | None = None
    selfTangency: bool | None = None

    @property
    def label(self) -> str:
        if self.cls is not None:
            return self.cls.name
        return "inconclusive" if self.error == "Inconclusive" else "error"


@dataclass
class BifurcationGrid:
    spec: DeformationSpec
    points: list[GridPoint] = field(default_factory=list)

    def to_csv(self) -> bytes:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = list(self.spec.paramNames) + ["class", "certifiedToJet"]
        tangency = any(p.selfTangency is not None for p in self.points)
        if tangency:
            head.append("selfTangency")
        w.writerow(head)
        for p in self.points:
            row = [qstr(v) for v in p.lam] + [p.label, p.certifiedToJet]
            if tangency:
                row.append("" if p.selfTangency is None else int(p.selfTangency))
            w.writerow(row)
        return buf.getvalue().encode()

    def to_json(self) -> dict:
        return {
            "deformation": self.spec.to_json(),
            "points": [{"lambda": [qstr(v) for v in p.lam], "class": p.label,
                        "certifiedToJet": p.certifiedToJet, "error": p.error,
                        "selfTangency": p.selfTangency} for p in self.points],
        }

    def dumps(self) -> bytes:
        return (json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n").encode()


def bifurcation_grid(cls, axes: list[list], trunc: int = 16, maxJet: int | None = None,
                     selfTangency: bool = False, traceRes: int = 200) -> BifurcationGrid:
    """Apply the miniversal deformation at every grid point and classify the result."""
    spec = miniversal_spec(cls)
    if len(axes) != spec.tau:
        raise ContractViolation(f"{spec.forClass.name} has {spec.tau} parameters, got {len(axes)} axes")
    from .catalog import normal_form
    pf0 = normal_form(spec.forClass, trunc)
    out = BifurcationGrid(spec)
    for pt in itertools.product(*axes):
        pt = tuple(Q(v) for v in pt)
        pf = apply(pf0, spec, pt)
        try:
            rep = classify(pf, maxJet=maxJet)
            gp = GridPoint(pt, rep.cls, rep.certifiedToJet)
        except Inconclusive as ex:
            gp = GridPoint(pt, None, ex.max_jet if ex.max_jet is not None else trunc, "Inconclusive")
        except GermforgeError as ex:
            gp = GridPoint(pt, None, trunc, type(ex).__name__)
        if selfTangency:
            gp.selfTangency = has_self_tangency(pf, res=traceRes)
        out.points.append(gp)
    return out


def has_self_tangency(pf: PrenormalForm, box=(-0.5, 0.5, -0.5, 0.5), res: int = 200,
                      cells: float = 2.0, angle: float = 0.1, arc: float = 50.0,
                      core: float = 0.1) -> bool:
    """Numeric near-self-tangency of the traced non-support envelope branches.

    Two samples count as touching when they are within ``cells`` grid cells
    of each other, have tangents within ``angle`` radians of parallel, and are
    separated by at least ``arc`` cells of image arclength (or lie on
    different polylines).  The disc of radius ``core`` times the extent around
    the base point is ignored: the halves of a cusp there look tangent at any
    finite resolution.
    """
    sk = trace_numeric(pf, box, res)
    lines = [ln for ln, lab in zip(sk.polylines, sk.labels) if lab == "criminant" and len(ln) > 2]
    if not lines:
        return False
    xmin, xmax, ymin, ymax = sk.bounding_box()
    ext = max(xmax - xmin, ymax - ymin)
    return polylines_self_tangent(lines, cells * ext / res, angle, arc, core * ext)


def polylines_self_tangent(lines: list[np.ndarray], eps: float, angle: float = 0.1,
                           arc: float = 50.0, core: float = 0.0) -> bool:
    """True when two far-apart samples of ``lines`` touch with near-parallel tangents."""
    pts, tans, ids, arcs = [], [], [], []
    loops = {}
    for k, ln in enumerate(lines):
        if len(ln) < 3:
            continue
        d = np.gradient(ln, axis=0)
        norm = np.linalg.norm(d, axis=1)
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(ln, axis=0), axis=1))])
        # closed contours: arclength is measured around the loop
        if np.linalg.norm(ln[0] - ln[-1]) < 1e-12 * max(1.0, s[-1]):
            loops[k] = s[-1]
        ok = (norm > 0) & (np.linalg.norm(ln, axis=1) > core)
        pts.append(ln[ok])
        tans.append(d[ok] / norm[ok, None])
        ids.append(np.full(ok.sum(), k))
        arcs.append(s[ok])
    if not pts:
        return False
    P, T, K, S = np.vstack(pts), np.vstack(tans), np.concatenate(ids), np.concatenate(arcs)
    for a in range(len(P)):
        near = np.nonzero(np.linalg.norm(P[a + 1:] - P[a], axis=1) < eps)[0] + a + 1
        for b in near:
            if K[a] == K[b]:
                gap = abs(S[a] - S[b])
                if K[a] in loops:
                    gap = min(gap, loops[K[a]] - gap)
                if gap < arc * eps:
                    continue
            if abs(T[a, 0] * T[b, 1] - T[a, 1] * T[b, 0]) < np.sin(angle):
                return True
    return False
