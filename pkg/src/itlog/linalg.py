"""Exact linear algebra over the integers: modular rank and nullspaces.

Matrices are lists of rows of Python integers.  Elimination is Bareiss'
fraction-free scheme, so intermediate entries stay integral and bounded by
minors of the input.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

try:  # optional acceleration of big-integer arithmetic
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int

PRIME = (1 << 61) - 1

__all__ = ["rank_mod_p", "bareiss_echelon", "nullspace", "clear_denominators", "primitive"]


def rank_mod_p(rows, p: int = PRIME) -> int:
    """Rank of an integer matrix modulo ``p``; a lower bound for its rational rank."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        top = m[rank]
        inv = pow(top[c], p - 2, p)
        for i in range(rank + 1, len(m)):
            row = m[i]
            f = row[c]
            if f:
                f = f * inv % p
                for j in range(c, ncols):
                    if top[j]:
                        row[j] = (row[j] - f * top[j]) % p
        rank += 1
        if rank == len(m):
            break
    return rank


def bareiss_echelon(rows):
    """Fraction-free row echelon form; returns (echelon rows, pivot columns)."""
    m = [[_big(x) for x in r] for r in rows]
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    prev = _big(1)
    r = 0
    pivots = []
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        top = m[r]
        pc = top[c]
        for i in range(r + 1, nrows):
            row = m[i]
            a = row[c]
            for j in range(c + 1, ncols):
                row[j] = (pc * row[j] - a * top[j]) // prev
            row[c] = _big(0)
        prev = pc
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def primitive(vec):
    """Scale a rational vector to coprime integers (sign untouched)."""
    den = 1
    for x in vec:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


def nullspace(rows, ncols: int | None = None) -> list[list[int]]:
    """Basis of the rational nullspace of an integer matrix, as primitive integer vectors.

    One basis vector per non-pivot column, with a 1 in that column and zeros
    in the other free columns.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    ech, pivots = bareiss_echelon(rows)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for k in range(len(pivots) - 1, -1, -1):
            pc = pivots[k]
            row = ech[k]
            s = sum((int(row[j]) * x[j] for j in range(pc + 1, ncols) if row[j] and x[j]), Fraction(0))
            x[pc] = -s / int(row[pc])
        basis.append(primitive(x))
    return basis


def clear_denominators(columns):
    """Scale each rational column to integers; returns (integer rows, column scales)."""
    scales = []
    int_cols = []
    for col in columns:
        d = 1
        for x in col:
            if x:
                d = lcm(d, x.denominator)
        scales.append(d)
        int_cols.append([int(x * d) for x in col])
    nrows = len(int_cols[0]) if int_cols else 0
    rows = [[c[i] for c in int_cols] for i in range(nrows)]
    return rows, scales
