"""Small exact linear algebra over any field whose elements support + - * / and truthiness.

Works for Fraction, TowerScalar and QuotientScalar entries alike.  Matrices are
lists of rows.  Univariate polynomials are coefficient lists, lowest degree first.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "rank",
    "solve",
    "nullspace",
    "charpoly",
    "upoly_trim",
    "upoly_divmod",
    "upoly_gcd",
    "upoly_derivative",
    "upoly_eval",
    "squarefree_factorization",
]


def _echelon(rows, ncols):
    """Row-reduce in place to reduced echelon form; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank(matrix) -> int:
    if not matrix:
        return 0
    rows = [list(row) for row in matrix]
    return len(_echelon(rows, len(rows[0])))


def solve(A, rhs):
    """Unique solution of A x = rhs for square A, or None when A is singular."""
    n = len(A)
    aug = [list(row) + [b] for row, b in zip(A, rhs)]
    piv = _echelon(aug, n)
    if len(piv) < n:
        return None
    return [aug[i][n] for i in range(n)]


def nullspace(matrix):
    """Basis of {v : M v = 0} as a list of vectors."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [list(row) for row in matrix]
    piv = _echelon(rows, ncols)
    zero = Fraction(0)
    one = Fraction(1)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, c in enumerate(piv):
            v[c] = -rows[i][f]
        basis.append(v)
    return basis


def charpoly(A):
    """det(tI - A), lowest degree first, by Faddeev-LeVerrier (characteristic 0)."""
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[n - k + 1]
        AM = [[sum((A[i][l] * M[l][j] for l in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        M = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        tr = sum((sum((A[i][l] * M[l][i] for l in range(n)), Fraction(0)) for i in range(n)), Fraction(0))
        coeffs[n - k] = -tr / k
    return coeffs


def upoly_trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def upoly_divmod(a, b):
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = list(a)
    lb = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = r[i + len(b) - 1] / lb
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                r[i + j] = r[i + j] - c * bj
    return q, upoly_trim(r[: len(b) - 1])


def upoly_gcd(a, b):
    """Monic gcd."""
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def upoly_derivative(p):
    return [i * c for i, c in enumerate(p)][1:]


def upoly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree_factorization(p):
    """Yun's algorithm: list of (factor, multiplicity) with monic square-free factors."""
    p = upoly_trim(p)
    if len(p) <= 1:
        return []
    lead = p[-1]
    p = [c / lead for c in p]
    out = []
    dp = upoly_derivative(p)
    a = upoly_gcd(p, dp)
    b, _ = upoly_divmod(p, a)
    c, _ = upoly_divmod(dp, a)
    d = [x - y for x, y in _zip_pad(c, upoly_derivative(b))]
    i = 1
    while len(upoly_trim(b)) > 1:
        a = upoly_gcd(b, d)
        b, _ = upoly_divmod(b, a)
        c, _ = upoly_divmod(d, a)
        if len(upoly_trim(a)) > 1:
            out.append((a, i))
        d = [x - y for x, y in _zip_pad(c, upoly_derivative(b))]
        i += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    z = Fraction(0)
    return zip(list(a) + [z] * (n - len(a)), list(b) + [z] * (n - len(b)))
