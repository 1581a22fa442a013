"""Small dense linear algebra, twice: exact over Fraction/int and numeric
over mpmath.  Matrices on the exact side are plain lists of lists."""
from __future__ import annotations

from fractions import Fraction

from mpmath import mp

from .errors import MalformedInput

# ---------------------------------------------------------------------------
# exact side


def identity(n, one=1):
    return [[one if i == j else one * 0 for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(r) for r in zip(*A)]


def mat_mul(A, B):
    k = len(B)
    if any(len(r) != k for r in A):
        raise MalformedInput("matrix dimensions do not match")
    bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in A]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[c * a for a in row] for row in A]


def mat_eq(A, B):
    return all(ra == rb for ra, rb in zip(A, B)) and len(A) == len(B)


def max_abs(A):
    return max(abs(a) for row in A for a in row)


def det_exact(A):
    """Determinant by fraction-free-ish Gaussian elimination over Fraction."""
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            det = -det
        det *= M[col][col]
        inv = 1 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return det


def inverse_exact(A):
    """Exact inverse over Fraction; raises MalformedInput when singular."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(i == j) for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise MalformedInput("matrix is singular")
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [a * inv for a in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


def charpoly_exact(A):
    """Characteristic polynomial det(xI - A) over Fraction, constant first,
    monic.  Faddeev-LeVerrier; exact for rational input."""
    n = len(A)
    Aq = [[Fraction(x) for x in row] for row in A]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = identity(n, Fraction(1))
    for k in range(1, n + 1):
        M = mat_mul(Aq, M)
        c = -sum(M[i][i] for i in range(n)) / k
        coeffs[n - k] = c
        for i in range(n):
            M[i][i] += c
    return coeffs


def int_matrix(A):
    """Validate/coerce a square matrix of integers."""
    out = []
    for row in A:
        out.append([int(x) for x in row])
    if any(len(r) != len(out) for r in out):
        raise MalformedInput("matrix is not square")
    return out


# ---------------------------------------------------------------------------
# mpmath side


def to_mp(A):
    m = mp.matrix(len(A), len(A[0]))
    for i, row in enumerate(A):
        for j, x in enumerate(row):
            if isinstance(x, Fraction):
                m[i, j] = mp.mpf(x.numerator) / x.denominator
            else:
                m[i, j] = x
    return m


def mp_rows(M):
    return [[M[i, j] for j in range(M.cols)] for i in range(M.rows)]


def minf(M):
    """Entry-wise max-norm of an mp.matrix."""
    return max(abs(M[i, j]) for i in range(M.rows) for j in range(M.cols))


def herm(M):
    return M.transpose_conj() if hasattr(M, "transpose_conj") else M.T


def cholesky_pivots(Y):
    """Lower-triangular Cholesky of a symmetric mp.matrix; returns (L, pivots)
    or (None, pivots-so-far) when a pivot is not positive."""
    n = Y.rows
    L = mp.zeros(n, n)
    pivots = []
    for j in range(n):
        s = Y[j, j] - sum(L[j, k] ** 2 for k in range(j))
        if s <= 0:
            return None, pivots
        piv = mp.sqrt(s)
        pivots.append(piv)
        L[j, j] = piv
        for i in range(j + 1, n):
            L[i, j] = (Y[i, j] - sum(L[i, k] * L[j, k] for k in range(j))) / piv
    return L, pivots
