"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], int, int]:
    A = [[Fraction(x) for x in row] for row in rows]
    if not A:
        return A, 0, 1
    m, n = len(A), len(A[0])
    r, sign = 0, 1
    for col in range(n):
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
            sign = -sign
        p = A[r][col]
        for i in range(r + 1, m):
            f = A[i][col]
            if f:
                f /= p
                Ai, Ar = A[i], A[r]
                for j in range(col, n):
                    Ai[j] -= f * Ar[j]
        r += 1
        if r == m:
            break
    return A, r, sign


def rank(rows: Sequence[Sequence]) -> int:
    return _echelon(rows)[1]


def det(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    A, r, sign = _echelon(rows)
    if r < n:
        return Fraction(0)
    out = Fraction(sign)
    for i in range(n):
        out *= A[i][i]
    return out


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0} over Q."""
    A = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    m = len(A)
    for col in range(ncols):
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][col]
        A[r] = [x / p for x in A[r]]
        for i in range(m):
            if i != r and A[i][col]:
                f = A[i][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fcol]
        basis.append(v)
    return basis
