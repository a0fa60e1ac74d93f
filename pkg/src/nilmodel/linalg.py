"""Exact dense linear algebra over Q or Q(sqrt d).

Matrices are lists of rows; entries are Fractions or QuadFieldElems. Nothing
here touches floats.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _is_zero(x) -> bool:
    return x == 0


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if not _is_zero(m[i][c])), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], int) else Fraction(1, m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, zero=Fraction(0), one=Fraction(1)):
    """Basis of {x : M x = 0}, one vector per free column, in column order."""
    red, piv = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, piv):
            v[p] = zero - row[f]
        basis.append(v)
    return basis


def span_basis(vectors: Sequence[Sequence]) -> list[list]:
    """Row-reduced basis of the span of ``vectors``."""
    vecs = [list(v) for v in vectors if any(not _is_zero(x) for x in v)]
    if not vecs:
        return []
    return rref(vecs)[0]


def solve(a_rows: Sequence[Sequence], b: Sequence):
    """One solution of A x = b, or None if inconsistent."""
    n = len(a_rows[0]) if a_rows else 0
    aug = [list(r) + [bi] for r, bi in zip(a_rows, b)]
    red, piv = rref(aug, n + 1)
    if n in piv:
        return None
    zero = b[0] * 0 if len(b) else Fraction(0)
    x = [zero] * n
    for row, p in zip(red, piv):
        x[p] = row[n]
    return x


def coordinates(basis: Sequence[Sequence], v: Sequence):
    """Coefficients c with sum c_i basis_i = v, or None if v not in span."""
    if not basis:
        return [] if all(_is_zero(x) for x in v) else None
    cols = [[basis[j][i] for j in range(len(basis))] for i in range(len(v))]
    return solve(cols, v)


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), row[0] * 0) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), v[0] * 0) for row in a]


def identity(n: int, zero=Fraction(0), one=Fraction(1)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def inverse(a):
    n = len(a)
    zero = a[0][0] * 0
    one = zero + 1
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def determinant(a):
    n = len(a)
    m = [list(r) for r in a]
    det = m[0][0] * 0 + 1
    for c in range(n):
        pr = next((i for i in range(c, n) if not _is_zero(m[i][c])), None)
        if pr is None:
            return det * 0
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det = det * m[c][c]
        for i in range(c + 1, n):
            if not _is_zero(m[i][c]):
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det
