"""Recursive-descent parser for family expressions ``<x-expr> ; <y-expr>``.

Grammar (whitespace is insignificant, no implicit multiplication)::

    family   := expr ';' expr
    expr     := term (('+' | '-') term)*
    term     := '-'? factor ('*' factor)*
    factor   := base ('^' natural)?
    base     := 'xi' | 't' | rational | '(' expr ')'
    rational := integer ('/' positive-integer)?

The optional leading ``-`` of a term negates the whole product; it is what
lets canonical series text such as ``-1/2*t^5 + t^2*xi`` round-trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ParseError
from .series import DEFAULT_TRUNCATION, Series2, Trunc


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str  # "xi" or "t"


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*'
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


Node = Union[Num, Var, BinOp, Pow, Neg]


@dataclass(frozen=True)
class FamilyExpr:
    xExpr: Node
    yExpr: Node


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, end
    text: str
    line: int
    col: int


_OPS = set("+-*^()/;")


def tokenize(text: str) -> list[Token]:
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and text[j].isalnum():
                j += 1
            word = text[i:j]
            if word not in ("xi", "t"):
                raise ParseError(f"unknown name {word!r}", line, col)
            toks.append(Token("name", word, line, col))
            col += j - i
            i = j
            continue
        if ch in _OPS:
            toks.append(Token("op", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def _fail(self, what: str):
        tok = self.cur
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"syntax error: expected {what}, got {got}", tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.cur.kind == "op" and self.cur.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self._fail(repr(text))

    def family(self) -> FamilyExpr:
        x = self.expr()
        self.expect(";")
        y = self.expr()
        if self.cur.kind != "end":
            self._fail("end of input")
        return FamilyExpr(x, y)

    def single(self) -> Node:
        node = self.expr()
        if self.cur.kind != "end":
            self._fail("end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.cur.text
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        negate = self.accept("-")
        node = self.factor()
        while self.accept("*"):
            node = BinOp("*", node, self.factor())
        return Neg(node) if negate else node

    def factor(self) -> Node:
        node = self.base()
        if self.accept("^"):
            tok = self.cur
            if tok.kind != "int":
                raise ParseError("exponent is not a natural number", tok.line, tok.col)
            self.pos += 1
            if self.cur.kind == "op" and self.cur.text in "/^":
                raise ParseError("exponent is not a natural number", tok.line, tok.col)
            node = Pow(node, int(tok.text))
        return node

    def base(self) -> Node:
        tok = self.cur
        if tok.kind == "name":
            self.pos += 1
            return Var(tok.text)
        if tok.kind == "int":
            self.pos += 1
            value = Fraction(int(tok.text))
            if self.accept("/"):
                den = self.cur
                if den.kind != "int" or int(den.text) == 0:
                    raise ParseError("denominator must be a positive integer", den.line, den.col)
                self.pos += 1
                value = Fraction(int(tok.text), int(den.text))
            return Num(value)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self._fail("'xi', 't', a number or '('")


def parse_expr(text: str) -> Node:
    return _Parser(text).single()


def parse_family(text: str) -> FamilyExpr:
    return _Parser(text).family()


# ---------------------------------------------------------------------------
# rendering (inverse of the parser on ASTs)

def _num_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _atom(node: Node) -> str:
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Num) and node.value >= 0:
        return _num_text(node.value)
    return f"({render_expr(node)})"


def _factor(node: Node) -> str:
    if isinstance(node, Pow):
        return f"{_atom(node.base)}^{node.exp}"
    return _atom(node)


def _term(node: Node) -> str:
    if isinstance(node, Neg):
        inner = node.operand
        if isinstance(inner, BinOp) and inner.op == "*":
            return "-" + _product(inner)
        return "-" + _factor(inner)
    return _product(node)


def _product(node: Node) -> str:
    if isinstance(node, BinOp) and node.op == "*":
        left = node.left
        ltxt = _product(left) if isinstance(left, BinOp) and left.op == "*" else _factor(left)
        return f"{ltxt}*{_factor(node.right)}"
    return _factor(node)


def render_expr(node: Node) -> str:
    if isinstance(node, BinOp) and node.op in "+-":
        return f"{render_expr(node.left)} {node.op} {_term(node.right)}"
    return _term(node)


def render_family(fam: FamilyExpr) -> str:
    return f"{render_expr(fam.xExpr)} ; {render_expr(fam.yExpr)}"


# ---------------------------------------------------------------------------
# evaluation

def evaluate(node: Node, trunc: Trunc | int = DEFAULT_TRUNCATION) -> Series2:
    if isinstance(trunc, int):
        trunc = Trunc(trunc)
    if isinstance(node, Num):
        return Series2.const(node.value, trunc)
    if isinstance(node, Var):
        return Series2.xi(trunc) if node.name == "xi" else Series2.t(trunc)
    if isinstance(node, Neg):
        return -evaluate(node.operand, trunc)
    if isinstance(node, Pow):
        return evaluate(node.base, trunc) ** node.exp
    left, right = evaluate(node.left, trunc), evaluate(node.right, trunc)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return left * right


def parse_series(text: str, trunc: Trunc | int = DEFAULT_TRUNCATION) -> Series2:
    return evaluate(parse_expr(text), trunc)


def parse_map(text: str, trunc: Trunc | int = DEFAULT_TRUNCATION):
    from .germ import MapGerm

    fam = parse_family(text)
    return MapGerm(evaluate(fam.xExpr, trunc), evaluate(fam.yExpr, trunc))
