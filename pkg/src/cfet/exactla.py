"""Exact rational linear algebra on lists of :class:`~fractions.Fraction`.

Solves use fraction-free (Bareiss) elimination with partial pivoting on the
integer matrix obtained by clearing row denominators, then exact rational
back substitution.  Matrices are lists of rows; vectors are plain lists.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm


class SingularMatrixError(ArithmeticError):
    pass


class NotPositiveDefiniteError(ArithmeticError):
    pass


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def matmul(A, B):
    Bt = transpose(B)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in A]


def dot(u, v):
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def quad(u, A, v):
    """u^T A v."""
    return dot(u, matvec(A, v))


def sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_zero(A) -> bool:
    return all(x == 0 for row in A for x in row)


def _integer_rows(A, B):
    rows = []
    for ra, rb in zip(A, B):
        row = [Fraction(x) for x in ra] + [Fraction(x) for x in rb]
        m = lcm(*(x.denominator for x in row))
        rows.append([int(x * m) for x in row])
    return rows


def solve(A, B):
    """Solve A X = B exactly; B is a list of rows (n x r) or a vector."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("A must be square")
    vector = bool(B) and not isinstance(B[0], (list, tuple))
    Bm = [[x] for x in B] if vector else B
    if len(Bm) != n:
        raise ValueError("shape mismatch between A and B")
    r = len(Bm[0]) if n else 0
    M = _integer_rows(A, Bm)
    width = n + r
    prev = 1
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(M[i][k]))
        if M[p][k] == 0:
            raise SingularMatrixError("matrix is singular")
        if p != k:
            M[k], M[p] = M[p], M[k]
        pivot = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, width):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    X = [[Fraction(0)] * r for _ in range(n)]
    for c in range(r):
        for i in range(n - 1, -1, -1):
            acc = Fraction(M[i][n + c])
            for j in range(i + 1, n):
                acc -= M[i][j] * X[j][c]
            X[i][c] = acc / M[i][i]
    return [row[0] for row in X] if vector else X


def inverse(A):
    return solve(A, identity(len(A)))


def det(A) -> Fraction:
    """Determinant via Bareiss on the denominator-cleared matrix."""
    n = len(A)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    M = []
    for row in A:
        row = [Fraction(x) for x in row]
        m = lcm(*(x.denominator for x in row))
        scale *= m
        M.append([int(x * m) for x in row])
    sign, prev = 1, 1
    for k in range(n - 1):
        p = max(range(k, n), key=lambda i: abs(M[i][k]))
        if M[p][k] == 0:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return Fraction(sign * M[n - 1][n - 1]) / scale


def ldl_pivots(S):
    """Pivots of a symmetric LDL^T factorization with diagonal pivoting.

    Returns the list of pivots in elimination order.  S is positive definite
    iff all pivots are > 0.
    """
    n = len(S)
    A = [[Fraction(x) for x in row] for row in S]
    for i in range(n):
        for j in range(i):
            if A[i][j] != A[j][i]:
                raise NotPositiveDefiniteError("matrix is not symmetric")
    idx = list(range(n))
    pivots = []
    for _ in range(n):
        p = max(idx, key=lambda i: A[i][i])
        piv = A[p][p]
        pivots.append(piv)
        idx.remove(p)
        if piv == 0:
            break
        for i in idx:
            f = A[i][p] / piv
            if f:
                for j in idx:
                    A[i][j] -= f * A[p][j]
    return pivots


def is_positive_definite(S) -> bool:
    try:
        pivots = ldl_pivots(S)
    except NotPositiveDefiniteError:
        return False
    return len(pivots) == len(S) and all(p > 0 for p in pivots)


def require_spd(S):
    if not is_positive_definite(S):
        raise NotPositiveDefiniteError("matrix is not symmetric positive definite")
