"""Exact dense linear algebra over Z and Q.

Matrices are lists of rows.  Ranks go through fraction-free elimination
on integer rows; kernels use Gauss-Jordan over Q, which is fine at the
sizes where a kernel is actually needed.
"""

from __future__ import annotations

from math import lcm

from gmpy2 import mpq

from . import kernels
from .exactcore.poly import as_q


def identity(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(A: list) -> list:
    return [list(col) for col in zip(*A)] if A else []


def mat_mul(A: list, B: list) -> list:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: list, v) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def mat_pow(A: list, k: int) -> list:
    if k < 0:
        raise ValueError("negative matrix power")
    result = identity(len(A))
    base = A
    while k:
        if k & 1:
            result = mat_mul(result, base)
        k >>= 1
        if k:
            base = mat_mul(base, base)
    return result


def mat_add(A: list, B: list) -> list:
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def mat_scale(A: list, c) -> list:
    return [[c * a for a in r] for r in A]


def trace(A: list):
    return sum(A[i][i] for i in range(len(A)))


def kron(A: list, B: list) -> list:
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def pairing(u, G: list, v):
    """The bilinear form ``u^T G v``."""
    return sum(u[i] * G[i][j] * v[j] for i in range(len(u)) for j in range(len(v)) if G[i][j])


def is_symmetric(A: list) -> bool:
    return all(A[i][j] == A[j][i] for i in range(len(A)) for j in range(i))


def integer_row(row) -> list:
    """Scale a rational row to integers (rank-preserving)."""
    qs = [as_q(x) for x in row]
    den = 1
    for q in qs:
        if q.denominator != 1:
            den = lcm(den, int(q.denominator))
    return [int(q * den) for q in qs]


def echelon(rows: list) -> tuple:
    """Fraction-free row echelon form: ``(rows, pivot_columns)``."""
    return kernels.bareiss_echelon([integer_row(r) for r in rows])


def rank(rows: list) -> int:
    if not rows or not rows[0]:
        return 0
    return len(echelon(rows)[1])


def rank_mod(rows: list, p: int) -> int:
    """Rank of an integer matrix modulo the prime ``p``."""
    if not rows or not rows[0]:
        return 0
    return kernels.rank_mod(rows, p)


def rref(rows: list) -> tuple:
    """Reduced row echelon form over Q: ``(rows, pivots)``."""
    m = [[as_q(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(A: list, ncols: int | None = None) -> list:
    """Basis of ``{x : A x = 0}`` over Q."""
    if not A:
        n = ncols or 0
        return [[mpq(1) if i == j else mpq(0) for i in range(n)] for j in range(n)]
    n = len(A[0])
    R, pivots = rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [mpq(0)] * n
        v[f] = mpq(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def left_kernel(rows: list) -> list:
    """Basis of ``{c : sum_i c_i rows[i] = 0}``."""
    if not rows:
        return []
    return nullspace(transpose(rows), ncols=len(rows))


def faddeev_leverrier(M: list) -> tuple:
    """Characteristic polynomial and adjugate pieces.

    Returns ``(c, N)`` with ``det(xI - M) = sum c[k] x^k`` (constant first)
    and ``adj(xI - M) = sum_{k<d} x^k N[k]``.
    """
    d = len(M)
    c = [mpq(0)] * (d + 1)
    c[d] = mpq(1)
    N = [None] * d
    Mk = [[mpq(0)] * d for _ in range(d)]
    for k in range(1, d + 1):
        Mk = mat_mul(M, Mk)
        for i in range(d):
            Mk[i][i] += c[d - k + 1]
        N[d - k] = Mk
        c[d - k] = -trace(mat_mul(M, Mk)) / k
    return c, N


def charpoly(M: list) -> list:
    """Integer coefficients of ``det(xI - M)`` for an integer matrix."""
    c, _ = faddeev_leverrier(M)
    out = []
    for x in c:
        if x.denominator != 1:
            raise ValueError("characteristic polynomial is not integral")
        out.append(int(x))
    return out


def determinant(M: list):
    c, _ = faddeev_leverrier(M)
    d = len(M)
    return c[0] * (-1) ** d


def companion(p: list) -> list:
    """Companion matrix of a monic polynomial (coefficients constant first)."""
    p = [as_q(c) for c in p]
    if p[-1] != 1:
        raise ValueError("companion matrix needs a monic polynomial")
    d = len(p) - 1
    C = [[mpq(0)] * d for _ in range(d)]
    for i in range(1, d):
        C[i][i - 1] = mpq(1)
    for i in range(d):
        C[i][d - 1] = -p[i]
    return C
