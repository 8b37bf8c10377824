"""Sparse exact linear algebra over the rationals.

Rows are scaled to integers and reduced with fraction-free (integer, gcd
normalized) elimination.  Column order matters: pivots are taken leftmost, and
solutions set every free unknown to zero, so callers order columns by
preference (cheapest first).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Sequence


def _integer_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in row.values():
        d = Fraction(v).denominator
        den = den * d // gcd(den, d)
    out = {}
    for c, v in row.items():
        v = Fraction(v) * den
        if v:
            out[c] = int(v)
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


class Echelon:
    """Incremental row echelon form of a sparse integer matrix.

    ``pivots`` maps a pivot column to its reduced row; rows are kept primitive.
    """

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        row = dict(row)
        while row:
            col = min(row)
            prow = self.pivots.get(col)
            if prow is None:
                return row
            a, b = row[col], prow[col]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            new = {c: v * fa for c, v in row.items()}
            for c, v in prow.items():
                nv = new.get(c, 0) - v * fb
                if nv:
                    new[c] = nv
                else:
                    new.pop(c, None)
            row = _primitive(new)
        return row

    def add(self, row: Mapping[int, Fraction | int]) -> int | None:
        """Insert a row; returns the new pivot column or ``None`` if dependent."""
        red = self.reduce(_integer_row(row))
        if not red:
            return None
        col = min(red)
        self.pivots[col] = red
        return col

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _build_rows(columns: Sequence[Mapping[Hashable, Fraction]], rhs=None):
    index: dict[Hashable, int] = {}
    rows: list[dict[int, Fraction]] = []
    for j, col in enumerate(columns):
        for key, v in col.items():
            if not v:
                continue
            r = index.get(key)
            if r is None:
                r = index[key] = len(rows)
                rows.append({})
            rows[r][j] = Fraction(v)
    if rhs is not None:
        n = len(columns)
        for key, v in rhs.items():
            if not v:
                continue
            r = index.get(key)
            if r is None:
                r = index[key] = len(rows)
                rows.append({})
            rows[r][n] = Fraction(v)
    return rows


def solve_combination(columns: Sequence[Mapping[Hashable, Fraction]],
                      rhs: Mapping[Hashable, Fraction]) -> list[Fraction] | None:
    """Find ``x`` with ``sum_j x[j] * columns[j] == rhs`` (sparse vectors).

    Returns ``None`` when there is no solution.  Among solutions, the one
    supported on the leftmost independent columns is returned.
    """
    n = len(columns)
    rows = _build_rows(columns, rhs)
    ech = Echelon()
    for row in rows:
        red = ech.reduce(_integer_row(row))
        if not red:
            continue
        col = min(red)
        if col == n:
            return None
        ech.pivots[col] = red
    x = [Fraction(0)] * n
    for col in sorted(ech.pivots, reverse=True):
        row = ech.pivots[col]
        acc = Fraction(row.get(n, 0))
        for c, v in row.items():
            if c != col and c < n:
                acc -= v * x[c]
        x[col] = acc / row[col]
    return x


def rank(rows: Iterable[Mapping[int, Fraction]]) -> int:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return ech.rank


def nullspace(columns: Sequence[Mapping[Hashable, Fraction]]) -> list[list[Fraction]]:
    """Basis of ``{x : sum_j x[j] * columns[j] == 0}``."""
    n = len(columns)
    rows = _build_rows(columns)
    ech = Echelon()
    for row in rows:
        ech.add(row)
    # back-substitute to reduced form
    pivcols = sorted(ech.pivots)
    reduced: dict[int, dict[int, Fraction]] = {}
    for col in reversed(pivcols):
        row = {c: Fraction(v) for c, v in ech.pivots[col].items()}
        lead = row[col]
        for c in [c for c in row if c != col and c in reduced]:
            v = row.pop(c)
            for c2, v2 in reduced[c].items():
                nv = row.get(c2, 0) - v * v2
                if nv:
                    row[c2] = nv
                else:
                    row.pop(c2, None)
        reduced[col] = {c: v / lead for c, v in row.items() if c != col}
    free = [c for c in range(n) if c not in ech.pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for col, row in reduced.items():
            v = row.get(f)
            if v:
                vec[col] = -v
        basis.append(vec)
    return basis
