"""Small exact linear algebra over Gaussian rationals and over series rings."""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

from .series import ONE, ZERO, GaussianRational, TruncatedSeries

Matrix = list[list[GaussianRational]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = [[GaussianRational.coerce(x) for x in row] for row in rows]
    if any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def conjugate(m: Matrix) -> Matrix:
    return [[x.conjugate() for x in row] for row in m]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def _echelon(m: Matrix):
    """Row-reduce a copy; return (reduced rows, pivot columns, sign of row swaps)."""
    a = as_matrix(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    sign = 1
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            sign = -sign
        inv = a[r][c].inverse()
        for i in range(r + 1, rows):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots, sign


def det(m: Matrix) -> GaussianRational:
    n = len(m)
    if n == 0:
        return ONE
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    a, pivots, sign = _echelon(m)
    if len(pivots) < n:
        return ZERO
    out = GaussianRational(sign)
    for i in range(n):
        out = out * a[i][i]
    return out


def rank(m: Matrix) -> int:
    if not m:
        return 0
    return len(_echelon(m)[1])


def nonsingular_minor(m: Matrix) -> tuple[int, list[int], list[int]]:
    """Rank plus row and column index sets of a nonsingular maximal minor."""
    if not m or not m[0]:
        return 0, [], []
    _, cols, _ = _echelon(m)
    if not cols:
        return 0, [], []
    transposed = [[m[i][c] for i in range(len(m))] for c in cols]
    _, rows, _ = _echelon(transposed)
    return len(cols), rows, cols


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [row + identity(n)[i] for i, row in enumerate(as_matrix(m))]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[p] = aug[p], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def series_det(m: Sequence[Sequence[TruncatedSeries]], variables: Sequence[str] | None = None) -> TruncatedSeries:
    """Determinant of a square matrix of series by permutation expansion.

    ``variables`` is needed only for the empty matrix.
    """
    n = len(m)
    if n == 0:
        if variables is None:
            raise ValueError("variables required for an empty determinant")
        return TruncatedSeries.one(variables)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    total = TruncatedSeries.zero(m[0][0].variables)
    for p in permutations(range(n)):
        term = None
        for i in range(n):
            entry = m[i][p[i]]
            if entry.is_zero() and entry.exact:
                # an exact zero factor makes the product exactly zero
                term = None
                break
            term = entry if term is None else term * entry
        if term is not None:
            total = total + term if _perm_sign(p) > 0 else total - term
    return total
