"""Envelopes: exact criminant branches pushed through the family, and a
floating-point contour tracer for plots."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from skimage import measure

from .errors import ContractViolation, Inconclusive
from .germ import PrenormalForm, criminant_equation
from .puiseux import (BranchList, PlaneBranch, PuiseuxBranch, Side, branch_side, branches,
                      contact_order, param_branch_order)
from .series import Series2


@dataclass
class EnvelopeBranch:
    plane: PlaneBranch
    criminant: PuiseuxBranch | None
    order: tuple[int, int] | None
    contact: int | Fraction | None
    side: Side | None

    @property
    def smooth(self) -> bool:
        return self.order == (1, 1)

    def to_json(self) -> dict:
        contact = self.contact
        if isinstance(contact, Fraction):
            contact = str(contact)
        return {
            "order": list(self.order) if self.order else None,
            "contact": contact,
            "side": str(self.side) if self.side else None,
            "criminant": self.criminant.to_json() if self.criminant else None,
            "knownThrough": self.plane.known,
        }


@dataclass
class EnvelopeReport:
    supportBranch: PlaneBranch
    otherBranches: list[EnvelopeBranch]
    unresolved: int = 0
    vertical: int = 0

    def to_json(self) -> dict:
        return {
            "support": {"order": [1, 1], "knownThrough": self.supportBranch.known},
            "branches": [b.to_json() for b in self.otherBranches],
            "unresolvedComplexBranches": self.unresolved,
        }


# ---------------------------------------------------------------------------
# univariate helpers: {exponent: coeff}

def _umul(a: dict, b: dict, known: int) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e <= known:
                out[e] = out.get(e, 0) + c1 * c2
    return out


def _compose_along(s: Series2, ram: int, tser: dict, known: int) -> dict:
    """``s(xi = u^ram, t = t(u))`` as a univariate series through ``known``."""
    tp = [{0: 1}]
    maxj = max((j for _, j in s.terms), default=0)
    for _ in range(maxj):
        tp.append(_umul(tp[-1], tser, known))
    out: dict = {}
    for (i, j), c in s.terms.items():
        base = ram * i
        if base > known:
            continue
        for e, v in tp[j].items():
            if base + e <= known:
                out[base + e] = out.get(base + e, 0) + c * v
    return out


def _order(d: dict, zero_tol: float = 1e-10) -> int | None:
    nz = [e for e, c in d.items() if (abs(c) > zero_tol if isinstance(c, complex) else c)]
    return min(nz) if nz else None


def plane_branch_of(pf: PrenormalForm, br: PuiseuxBranch) -> PlaneBranch:
    """Image of a criminant branch ``t = t(xi)`` under ``(xi + t, phi)``."""
    phi = pf.phi
    N = phi.trunc.bound
    q = br.ramification
    # t(u) with xi = u^q; certified for u-exponents below truncOrder * q
    lt = math.ceil(br.truncOrder * q) - 1
    tser = {int(e * q): c for e, c in br.coeffs}
    ot = min(tser) if tser else None
    reach = (N + 1) * (min(q, ot) if ot else q) - 1
    work = max(lt, reach)
    phit = _compose_along(phi.diff("t"), q, tser, work)
    ophit = _order(phit)
    known_y = reach
    if ophit is not None:
        known_y = min(known_y, ophit + lt)
    known = min(lt, known_y)
    X = dict(tser)
    X[q] = X.get(q, 0) + 1
    Y = _compose_along(phi, q, tser, known)
    return PlaneBranch(X, Y, known)


def envelope_branches(pf: PrenormalForm, maxTerms: int | None = None) -> EnvelopeReport:
    g, h = criminant_equation(pf)
    N = pf.phi.trunc.bound
    support = PlaneBranch({1: 1}, {}, N)
    if maxTerms is None:
        maxTerms = N + 2
    out = []
    unresolved = 0
    vertical = 0
    if h.constant_term():
        return EnvelopeReport(support, out)
    bl: BranchList = branches(h, maxTerms)
    unresolved = sum(u.branch_count for u in bl.unresolved)
    vertical = bl.vertical
    for br in bl:
        if not br.is_real():
            unresolved += br.multiplicity
            continue
        if br.numeric:
            br = PuiseuxBranch(br.ramification, [(e, complex(c).real) for e, c in br.coeffs],
                               br.truncOrder, br.field, True, br.multiplicity, br.separated)
        plane = plane_branch_of(pf, br)
        try:
            order = param_branch_order(plane)
        except (ContractViolation, Inconclusive):
            # a branch collapsing to the origin through the known jet has no order
            order = None
        contact = contact_order(plane)
        try:
            side = branch_side(plane)
        except (ContractViolation, Inconclusive):
            side = None
        out.append(EnvelopeBranch(plane, br, order, contact, side))
    return EnvelopeReport(support, out, unresolved, vertical)


# ---------------------------------------------------------------------------
# numeric tracing

@dataclass
class EnvelopeSketch:
    polylines: list[np.ndarray]
    labels: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def bounding_box(self) -> tuple[float, float, float, float]:
        if not self.polylines:
            return (0.0, 0.0, 0.0, 0.0)
        pts = np.vstack(self.polylines)
        return (float(pts[:, 0].min()), float(pts[:, 0].max()),
                float(pts[:, 1].min()), float(pts[:, 1].max()))


def _poly_eval(s: Series2, xi: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(xi, t).shape)
    for (i, j), c in s.terms.items():
        out = out + float(c) * xi ** i * t ** j
    return out


def trace_numeric(pf: PrenormalForm, box=(-0.5, 0.5, -0.5, 0.5), res: int = 400,
                  lam: dict | None = None) -> EnvelopeSketch:
    """Contour the criminant on a ``res x res`` grid over the ``(xi, t)`` box and
    map each contour through ``(xi + t, phi)``.

    The support ``t = 0`` is added as its own polyline and the cofactor ``h``
    of ``g = t h`` is contoured; a product's zero set has saddle ambiguities
    where the support crosses the other branches.
    """
    if res < 16:
        raise ContractViolation("resolution must be at least 16")
    x0, x1, y0, y1 = (float(v) for v in box)
    if not (x1 > x0 and y1 > y0):
        raise ContractViolation("empty box")
    _, h = criminant_equation(pf)
    phi = pf.phi
    xs = np.linspace(x0, x1, res)
    ts = np.linspace(y0, y1, res)
    XI, T = np.meshgrid(xs, ts)
    H = _poly_eval(h, XI, T)
    lines, labels = [], []
    if y0 <= 0.0 <= y1:
        sx = xs
        lines.append(np.column_stack([sx, _poly_eval(phi, sx, np.zeros_like(sx))]))
        labels.append("support")
    dx, dt = (x1 - x0) / (res - 1), (y1 - y0) / (res - 1)
    if np.any(H > 0) and np.any(H < 0):
        for c in measure.find_contours(H, 0.0):
            xi = x0 + c[:, 1] * dx
            t = y0 + c[:, 0] * dt
            pts = np.column_stack([xi + t, _poly_eval(phi, xi, t)])
            lines.append(pts)
            labels.append("criminant")
    meta = {"phi": str(phi), "box": [x0, x1, y0, y1], "res": res}
    if lam:
        meta["lambda"] = {k: str(v) for k, v in lam.items()}
    return EnvelopeSketch(lines, labels, meta)


def _fmt(v: float) -> str:
    s = f"{v:.9g}"
    return "0" if s == "-0" else s


def emit(sketch: EnvelopeSketch, fmt: str) -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["polyline", "x", "y"])
        for k, line in enumerate(sketch.polylines):
            for x, y in line:
                w.writerow([k, repr(float(x)), repr(float(y))])
        return buf.getvalue().encode()
    if fmt != "svg":
        raise ContractViolation(f"unknown format {fmt!r}")
    xmin, xmax, ymin, ymax = sketch.bounding_box()
    w, h = xmax - xmin, ymax - ymin
    ext = max(w, h, 1e-9)
    # flat boxes (a lone support line) get a margin so the viewBox is not degenerate
    if w < 1e-3 * ext:
        xmin, w = xmin - 5e-4 * ext, 1e-3 * ext
    if h < 1e-3 * ext:
        ymin, h = ymin - 5e-4 * ext, 1e-3 * ext
    if not sketch.polylines:
        xmin, ymin, w, h, ext = 0.0, 0.0, 1.0, 1.0, 1.0
    sw = 0.005 * ext
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'viewBox="{_fmt(xmin)} {_fmt(-(ymin + h))} {_fmt(w)} {_fmt(h)}">']
    for line in sketch.polylines:
        d = " ".join(("M" if k == 0 else "L") + f"{_fmt(x)},{_fmt(-y)}" for k, (x, y) in enumerate(line))
        out.append(f'<path d="{d}" fill="none" stroke="black" stroke-width="{_fmt(sw)}"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()
