"""Exact Gaussian elimination over any field type.

Entries only need ``+ - * /`` and truthiness (nonzero).  Used with
``Fraction`` for root-datum/form computations and with :class:`Frac` for
Gram matrices.  Matrices are lists of row lists and are never mutated.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

Matrix = list[list[Any]]


def _copy(A: Sequence[Sequence[Any]]) -> Matrix:
    return [list(r) for r in A]


def rref(A: Sequence[Sequence[Any]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = _copy(A)
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence[Any]]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def transpose(A: Sequence[Sequence[Any]]) -> Matrix:
    return [list(c) for c in zip(*A)] if A else []


def independent_rows(A: Sequence[Sequence[Any]]) -> list[int]:
    """Indices of a maximal linearly independent set of rows (greedy, in order)."""
    if not A:
        return []
    return rref(transpose(A))[1]


def solve(A: Sequence[Sequence[Any]], b: Sequence[Any], zero: Any = Fraction(0)):
    """One solution x of A x = b, or None if inconsistent (free variables set to 0)."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [zero] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def nullspace(A: Sequence[Sequence[Any]], zero: Any = Fraction(0), one: Any = Fraction(1)) -> Matrix:
    n = len(A[0]) if A else 0
    if not A:
        return [[one if i == j else zero for i in range(n)] for j in range(n)]
    R, piv = rref(A)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * n
        v[f] = one
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


def inverse(A: Sequence[Sequence[Any]], zero: Any = Fraction(0), one: Any = Fraction(1)) -> Matrix:
    n = len(A)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def matmul(A: Sequence[Sequence[Any]], B: Sequence[Sequence[Any]], zero: Any = Fraction(0)) -> Matrix:
    Bt = transpose(B)
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            s = zero
            for a, b in zip(row, col):
                if a and b:
                    s = s + a * b
            out_row.append(s)
        out.append(out_row)
    return out


def matvec(A: Sequence[Sequence[Any]], v: Sequence[Any], zero: Any = Fraction(0)) -> list[Any]:
    out = []
    for row in A:
        s = zero
        for a, b in zip(row, v):
            if a and b:
                s = s + a * b
        out.append(s)
    return out


def det(A: Sequence[Sequence[Any]], zero: Any = Fraction(0), one: Any = Fraction(1)):
    M = _copy(A)
    n = len(M)
    d = one
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return zero
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        piv = M[c][c]
        d = d * piv
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / piv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d
