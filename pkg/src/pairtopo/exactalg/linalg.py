"""Exact Gaussian elimination over the rationals."""
from __future__ import annotations

from fractions import Fraction


class DimensionError(ValueError):
    pass


def _check(M):
    rows = [[Fraction(x) for x in row] for row in M]
    if rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged matrix")
    return rows


def rref(M):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    A = _check(M)
    if not A:
        return A, []
    m, n = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rank(M):
    return len(rref(M)[1])


def nullspace(M, ncols=None):
    """Basis of the right kernel, one vector per free column (free entry 1)."""
    A, pivots = rref(M)
    n = len(A[0]) if A else (ncols or 0)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(A, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(M, v):
    """One solution of ``M x = v`` (free variables set to 0), or ``None``."""
    A = _check(M)
    if len(A) != len(v):
        raise DimensionError(f"matrix has {len(A)} rows, vector has {len(v)} entries")
    n = len(A[0]) if A else 0
    aug = [row + [Fraction(b)] for row, b in zip(A, v)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(R, pivots):
        x[pc] = row[n]
    return x


def primitive(v):
    """Scale a rational vector to coprime integers (sign unchanged)."""
    from math import gcd, lcm

    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x // g) for x in ints)


def det(M, zero=0):
    """Determinant by cofactor expansion over any commutative ring.

    Minors are memoized on column subsets, so the cost is O(n 2^n) ring
    operations; fine for the small matrices used here.
    """
    n = len(M)
    if n == 0:
        return 1
    memo = {}

    def minor(row, cols):
        if row == n:
            return 1
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = zero
        sign = 1
        for idx, c in enumerate(cols):
            entry = M[row][c]
            if entry != 0:
                sub = minor(row + 1, cols[:idx] + cols[idx + 1:])
                term = entry * sub
                total = total + term if sign > 0 else total - term
            sign = -sign
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))
