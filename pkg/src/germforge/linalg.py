"""Exact rank and pivot computations on sparse rational row sets.

Rows are ``{column: rational}`` dicts.  They are scaled to primitive integer
rows and handed to FLINT's fraction-free integer echelon routines.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import flint
from gmpy2 import mpq

Row = Mapping[int, object]


def integer_row(row: Row) -> dict[int, int]:
    """Scale a rational row to a primitive integer row (same span)."""
    items = [(c, mpq(v)) for c, v in row.items() if v]
    if not items:
        return {}
    den = 1
    for _, v in items:
        den = math.lcm(den, int(v.denominator))
    ints = {c: int(v * den) for c, v in items}
    g = 0
    for v in ints.values():
        g = math.gcd(g, v)
    return {c: v // g for c, v in ints.items()}


def _matrix(rows: Sequence[Row], ncols: int, perm: Sequence[int] | None = None) -> flint.fmpz_mat:
    """Dense integer matrix; ``perm[k]`` is the original column placed at position ``k``."""
    pos = {c: k for k, c in enumerate(perm)} if perm is not None else None
    ints = [integer_row(r) for r in rows]
    ints = [r for r in ints if r]
    m = flint.fmpz_mat(max(len(ints), 1), ncols)
    for i, r in enumerate(ints):
        for c, v in r.items():
            m[i, pos[c] if pos is not None else c] = v
    return m


def rank(rows: Sequence[Row], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    return _matrix(rows, ncols).rank()


def pivot_columns(rows: Sequence[Row], ncols: int, order: Sequence[int] | None = None) -> list[int]:
    """Pivot columns of the reduced echelon form with columns taken in ``order``."""
    if not rows or ncols == 0:
        return []
    order = list(order) if order is not None else list(range(ncols))
    r, _, rk = _matrix(rows, ncols, order).rref()
    piv = []
    for i in range(rk):
        for k in range(ncols):
            if r[i, k] != 0:
                piv.append(order[k])
                break
    return piv


def greedy_complement(rows: Sequence[Row], ncols: int, priority: Iterable[int]) -> list[int]:
    """Columns picked in ``priority`` order, each kept iff its unit vector is
    independent of the rows plus the columns already kept.

    Column ``c`` is dependent exactly when some row has ``c`` as its last
    support element in priority order, so the picks are the free columns of
    an echelon form taken in reversed priority.  Columns missing from
    ``priority`` are never picked; they go last so that they lead their rows.
    """
    priority = list(priority)
    listed = set(priority)
    full = priority + [c for c in range(ncols) if c not in listed]
    piv = set(pivot_columns(rows, ncols, full[::-1]))
    return [c for c in priority if c not in piv]


def contains(rows: Sequence[Row], ncols: int, vec: Row, base_rank: int | None = None) -> bool:
    if base_rank is None:
        base_rank = rank(rows, ncols)
    return rank(list(rows) + [vec], ncols) == base_rank


def solve_in_span(vectors: Sequence[Row], target: Row, ncols: int) -> list[mpq] | None:
    """Coefficients ``c`` with ``sum c_k vectors[k] = target``, free variables set to 0."""
    m = len(vectors)
    a = flint.fmpq_mat(ncols, m + 1)
    for k, v in enumerate(vectors):
        for c, val in v.items():
            q = mpq(val)
            a[c, k] = flint.fmpq(int(q.numerator), int(q.denominator))
    for c, val in target.items():
        q = mpq(val)
        a[c, m] = flint.fmpq(int(q.numerator), int(q.denominator))
    r, rk = a.rref()
    sol = [mpq(0)] * m
    for i in range(rk):
        for k in range(m + 1):
            if r[i, k] != 0:
                if k == m:
                    return None
                val = r[i, m]
                sol[k] = mpq(int(val.p), int(val.q))
                break
    return sol
