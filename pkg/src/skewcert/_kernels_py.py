"""Pure-Python versions of the hot kernels.

Behaviour must match ``_kernels.pyx`` exactly; the test-suite runs both.
"""

from __future__ import annotations


def sparse_mul(a: dict, b: dict) -> dict:
    """Multiply two sparse polynomials keyed by packed exponent integers."""
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    bitems = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bitems:
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def sparse_square(a: dict) -> dict:
    items = list(a.items())
    out: dict = {}
    get = out.get
    n = len(items)
    for i in range(n):
        ki, ci = items[i]
        k = ki + ki
        out[k] = get(k, 0) + ci * ci
        c2 = 2 * ci
        for j in range(i + 1, n):
            kj, cj = items[j]
            k = ki + kj
            out[k] = get(k, 0) + c2 * cj
    return {k: c for k, c in out.items() if c}


def bareiss_echelon(rows: list) -> tuple[list, list]:
    """Fraction-free row echelon form of an integer matrix.

    Returns ``(echelon_rows, pivot_columns)``.  Rows are copied; pivoting
    picks, among candidate rows, the one with the fewest nonzero entries.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    if nrows == 0:
        return [], []
    ncols = len(m[0])
    pivots: list = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        best = -1
        best_w = 0
        for i in range(r, nrows):
            if m[i][c]:
                w = sum(1 for x in m[i] if x)
                if best < 0 or w < best_w:
                    best, best_w = i, w
        if best < 0:
            continue
        if best != r:
            m[r], m[best] = m[best], m[r]
        piv = m[r][c]
        prow = m[r]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            if f:
                for j in range(c + 1, ncols):
                    row[j] = (piv * row[j] - f * prow[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (piv * row[j]) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank_mod(rows: list, p: int) -> int:
    """Rank of an integer matrix reduced modulo the prime ``p``."""
    m = [[x % p for x in r] for r in rows]
    nrows = len(m)
    if nrows == 0:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        prow = m[r]
        for j in range(c, ncols):
            prow[j] = prow[j] * inv % p
        for i in range(r + 1, nrows):
            f = m[i][c]
            if f:
                row = m[i]
                for j in range(c, ncols):
                    row[j] = (row[j] - f * prow[j]) % p
        r += 1
    return r


def independent_rows_mod(rows: list, p: int) -> list:
    """Indices of a greedy maximal independent subset of ``rows`` mod ``p``."""
    basis = []  # (pivot, normalized row); later rows vanish on earlier pivots
    keep = []
    for idx, src in enumerate(rows):
        row = [x % p for x in src]
        for piv, b in basis:
            f = row[piv]
            if f:
                for j in range(len(row)):
                    if b[j]:
                        row[j] = (row[j] - f * b[j]) % p
        piv = next((j for j, x in enumerate(row) if x), -1)
        if piv < 0:
            continue
        inv = pow(row[piv], p - 2, p)
        row = [x * inv % p for x in row]
        for k, (q, b) in enumerate(basis):
            f = b[piv]
            if f:
                basis[k] = (q, [(x - f * y) % p for x, y in zip(b, row)])
        basis.append((piv, row))
        keep.append(idx)
    return keep
