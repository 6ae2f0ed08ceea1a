"""Singularity classes, their normal forms and miniversal directions, and the
adjacency graph between classes."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import NoFiniteSpec, UnknownClass
from .germ import PrenormalForm
from .parser import parse_series
from .series import Series2

INF = math.inf

TAGS = ("I", "II", "S1", "T", "S2_2", "S2_3", "S2_4", "S_ge3", "S1_INF", "T_INF", "S_INF", "U")


@dataclass(frozen=True)
class SingularityClass:
    tag: str
    n: int | None = None
    sign: int | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise UnknownClass(f"unknown class tag {self.tag!r}")
        if self.tag in ("S1", "T") and (self.n is None or self.n < 1):
            raise UnknownClass(f"{self.tag} needs an index n >= 1")
        if self.tag == "S_ge3" and (self.n is None or self.n < 3):
            raise UnknownClass("S_ge3 needs n >= 3")
        if self.tag == "S2_3" and self.sign not in (1, -1):
            raise UnknownClass("S2_3 needs a sign")

    @property
    def codim(self) -> int | float:
        return {"I": 0, "II": 1, "S2_2": 3, "S2_3": 4, "S2_4": 5}.get(
            self.tag, self.n + 1 if self.tag == "S1" else 2 * self.n + 1 if self.tag == "T" else INF)

    @property
    def tangCodim(self) -> int | float:
        return {"I": 0, "II": 0, "S2_2": 2, "S2_3": 3, "S2_4": 4}.get(
            self.tag, self.n if self.tag in ("S1", "T") else INF)

    @property
    def simple(self) -> bool:
        return self.tag in ("I", "II", "S1", "T", "S2_2", "S2_3", "S2_4")

    @property
    def name(self) -> str:
        if self.tag in ("I", "II", "U"):
            return self.tag
        if self.tag == "S1":
            return f"S1,{self.n}"
        if self.tag == "T":
            return f"T{self.n}"
        if self.tag == "S2_2":
            return "S2,2"
        if self.tag == "S2_3":
            return "S2,3" + ("+" if self.sign > 0 else "-")
        if self.tag == "S2_4":
            return "S2,4"
        if self.tag == "S_ge3":
            return f"S{self.n}"
        return {"S1_INF": "S1,inf", "T_INF": "Tinf", "S_INF": "Sinf"}[self.tag]

    def __str__(self) -> str:
        return self.name

    def to_json(self) -> dict:
        def num(v):
            return "inf" if v == INF else v

        return {"name": self.name, "tag": self.tag, "n": self.n, "sign": self.sign,
                "codim": num(self.codim), "tangCodim": num(self.tangCodim), "simple": self.simple}


_NAME = re.compile(r"^(?:(I|II|U|Tinf|Sinf|S1,inf)|S1,(\d+)|T(\d+)|S2,2|S2,3([+-])|S2,4|S(\d+))$")


def parse_class(name: str) -> SingularityClass:
    text = name.strip()
    m = _NAME.match(text)
    if not m:
        raise UnknownClass(f"unknown class name {name!r}")
    fixed, s1, tn, sign, sn = m.groups()
    if fixed:
        return SingularityClass({"Tinf": "T_INF", "Sinf": "S_INF", "S1,inf": "S1_INF"}.get(fixed, fixed))
    if s1:
        return SingularityClass("S1", int(s1))
    if tn:
        return SingularityClass("T", int(tn))
    if sign:
        return SingularityClass("S2_3", sign=1 if sign == "+" else -1)
    if text == "S2,2":
        return SingularityClass("S2_2")
    if text == "S2,4":
        return SingularityClass("S2_4")
    n = int(sn)
    if n < 3:
        raise UnknownClass(f"use S1,n or S2,k for {name!r}")
    return SingularityClass("S_ge3", n)


def simple_classes(max_n: int = 3) -> list[SingularityClass]:
    out = [SingularityClass("I"), SingularityClass("II")]
    out += [SingularityClass("S1", n) for n in range(1, max_n + 1)]
    out += [SingularityClass("T", n) for n in range(1, max_n + 1)]
    out += [SingularityClass("S2_2"), SingularityClass("S2_3", sign=1),
            SingularityClass("S2_3", sign=-1), SingularityClass("S2_4")]
    return out


# ---------------------------------------------------------------------------
# normal forms and table directions

def normal_form_text(cls: SingularityClass) -> str:
    """``phi`` of the normal form ``(xi + t, phi)`` in factored text."""
    tag, n = cls.tag, cls.n
    if tag == "I":
        return "t^2"
    if tag == "II":
        return "t^2*xi"
    if tag == "S1":
        return f"t^2*(t+xi) + t^4 + t^{2 * n + 3}"
    if tag == "T":
        return f"t^3 + t^2*(t+xi)^{n + 1}"
    if tag == "S2_2":
        return "t^2*(t+xi) + t^5 + t^6"
    if tag == "S2_3":
        return "t^2*(t+xi) + t^5 " + ("+" if cls.sign > 0 else "-") + " t^9"
    if tag == "S2_4":
        return "t^2*(t+xi) + t^5"
    raise NoFiniteSpec(f"{cls.name} has no normal form in the table")


def normal_form(cls: SingularityClass, trunc: int = 16) -> PrenormalForm:
    return PrenormalForm(parse_series(normal_form_text(cls), trunc))


def table_directions(cls: SingularityClass) -> list[str]:
    """Miniversal tangential deformation directions ``e_i``."""
    tag, n = cls.tag, cls.n
    if tag in ("I", "II"):
        return []
    if tag == "S1":
        return [f"t^{2 * i + 1}" for i in range(1, n + 1)]
    if tag == "T":
        return ["t^2"] + [f"t^2*xi^{i}" if i > 1 else "t^2*xi" for i in range(1, n)]
    if tag == "S2_2":
        return ["t^3", "t^4"]
    if tag == "S2_3":
        return ["t^3", "t^4", "t^6"]
    if tag == "S2_4":
        return ["t^3", "t^4", "t^6", "t^9"]
    raise NoFiniteSpec(f"{cls.name} is not simple; no miniversal deformation in the table")


def extra_directions(cls: SingularityClass) -> list[str]:
    """Non-tangential directions completing the table to a full A-complement."""
    if cls.tag in ("S1", "S2_2", "S2_3", "S2_4"):
        return ["t"]
    if cls.tag == "T":
        return ["t"] + [f"t*xi^{j}" if j > 1 else "t*xi" for j in range(1, cls.n + 1)]
    return []


def table_direction_series(cls: SingularityClass, trunc: int = 16) -> list[Series2]:
    return [parse_series(e, trunc) for e in table_directions(cls)]


# ---------------------------------------------------------------------------
# adjacency: L -> K when L deforms into K

def _direct(cls: SingularityClass, limit: int) -> list[SingularityClass]:
    C = SingularityClass
    tag, n = cls.tag, cls.n
    if tag == "I":
        return []
    if tag == "II":
        return [C("I")]
    if tag == "T":
        return [C("II") if n == 1 else C("T", n - 1)]
    if tag == "S1":
        return [C("II") if n == 1 else C("S1", n - 1)]
    if tag == "S2_2":
        return [C("S1", 1)]
    if tag == "S2_3":
        return [C("S2_2")]
    if tag == "S2_4":
        return [C("S2_3", sign=1), C("S2_3", sign=-1)]
    if tag == "S_ge3":
        below = [C("S2_4") if n == 3 else C("S_ge3", n - 1)]
        return below + [C("S1", m) for m in range(1, limit + 1)]
    if tag == "S_INF":
        return [C("S_ge3", m) for m in range(3, limit + 1)]
    if tag == "S1_INF":
        return [C("S1", m) for m in range(1, limit + 1)]
    if tag == "T_INF":
        return [C("T", m) for m in range(1, limit + 1)]
    if tag == "U":
        return [C("S_INF"), C("S1_INF"), C("T_INF")]
    raise UnknownClass(cls.tag)


def _as_class(c) -> SingularityClass:
    return c if isinstance(c, SingularityClass) else parse_class(c)


def adjacency_closure(cls, limit: int = 8) -> list[SingularityClass]:
    """All classes reachable from ``cls``; families indexed by all m are cut at ``limit``."""
    start = _as_class(cls)
    seen: dict[SingularityClass, None] = {}
    stack = [start]
    while stack:
        c = stack.pop()
        for d in _direct(c, limit):
            if d not in seen:
                seen[d] = None
                stack.append(d)
    return sorted(seen, key=lambda c: (c.codim if c.codim != INF else 10**9, c.name))


def adjacency(fromClass, toClass) -> bool:
    a, b = _as_class(fromClass), _as_class(toClass)
    if a == b:
        return False
    limit = max(8, (b.n or 0) + 1, (a.n or 0) + 1)
    return b in adjacency_closure(a, limit)
