"""Small exact linear algebra over Q or Q(sqrt d) (entries support + - * / and bool)."""
from fractions import Fraction

from .field import FieldScalar, Q


def _zero_like(x):
    return x * 0


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [[x if isinstance(x, FieldScalar) else Q(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse() if isinstance(m[r][c], FieldScalar) else 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    return len(rref(rows)[1])


def solve(A, b):
    """Some exact solution x of A x = b, or None if inconsistent."""
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    m, piv = rref(aug)
    if n in piv:
        return None
    x = [_zero_like(b[0]) if b else 0] * n
    for i, c in enumerate(piv):
        x[c] = m[i][n]
    return x


def int_det(rows):
    """Exact determinant of an integer (or rational) square matrix."""
    m = [[Q(x) for x in r] for r in rows]
    n = len(m)
    det = Q(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Q(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def independent_subset(vectors):
    """Indices of a maximal independent subset, greedy in the given order."""
    chosen = []
    rows = []
    for i, v in enumerate(vectors):
        trial = rows + [list(v)]
        if rank(trial) > len(rows):
            rows = trial
            chosen.append(i)
    return chosen


def as_fraction(x):
    return Fraction(int(x.numerator), int(x.denominator))
