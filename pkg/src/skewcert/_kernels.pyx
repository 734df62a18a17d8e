# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels: sparse polynomial products, fraction-free
elimination and modular rank.  Mirrors ``_kernels_py``."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    static inline uint64_t skc_mulmod(uint64_t a, uint64_t b, uint64_t p) {
        return (uint64_t)(((unsigned __int128)a * b) % p);
    }
    """
    uint64_t skc_mulmod(uint64_t a, uint64_t b, uint64_t p) nogil


def sparse_mul(dict a, dict b):
    cdef dict out = {}
    cdef list ak, av, bk, bv
    cdef Py_ssize_t i, j, na, nb
    cdef object k, c, ka, ca
    if len(a) > len(b):
        a, b = b, a
    ak = list(a.keys()); av = list(a.values())
    bk = list(b.keys()); bv = list(b.values())
    na = len(ak); nb = len(bk)
    for i in range(na):
        ka = ak[i]
        ca = av[i]
        for j in range(nb):
            k = ka + bk[j]
            c = out.get(k)
            if c is None:
                out[k] = ca * bv[j]
            else:
                out[k] = c + ca * bv[j]
    return {k: c for k, c in out.items() if c}


def sparse_square(dict a):
    cdef dict out = {}
    cdef list ak = list(a.keys())
    cdef list av = list(a.values())
    cdef Py_ssize_t i, j, n = len(ak)
    cdef object k, c, ki, ci, c2
    for i in range(n):
        ki = ak[i]
        ci = av[i]
        k = ki + ki
        c = out.get(k)
        out[k] = ci * ci if c is None else c + ci * ci
        c2 = 2 * ci
        for j in range(i + 1, n):
            k = ki + ak[j]
            c = out.get(k)
            if c is None:
                out[k] = c2 * av[j]
            else:
                out[k] = c + c2 * av[j]
    return {k: c for k, c in out.items() if c}


def bareiss_echelon(rows):
    cdef list m = [list(src) for src in rows]
    cdef Py_ssize_t nrows = len(m), ncols, r, c, i, j, best, w, best_w
    cdef list prow, row, pivots = []
    cdef object piv, prev, f, x
    if nrows == 0:
        return [], []
    ncols = len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        best = -1
        best_w = 0
        for i in range(r, nrows):
            row = m[i]
            if row[c]:
                w = 0
                for x in row:
                    if x:
                        w += 1
                if best < 0 or w < best_w:
                    best = i
                    best_w = w
        if best < 0:
            continue
        if best != r:
            m[r], m[best] = m[best], m[r]
        prow = m[r]
        piv = prow[c]
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


cdef inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) nogil:
    return skc_mulmod(a, b, p)


cdef uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) nogil:
    cdef uint64_t r = 1
    while e:
        if e & 1:
            r = mulmod(r, a, p)
        a = mulmod(a, a, p)
        e >>= 1
    return r


def rank_mod(rows, p):
    """Rank modulo a prime below 2**63, computed with machine words."""
    cdef Py_ssize_t nrows = len(rows), ncols, i, j, c, r, piv
    cdef uint64_t P, inv, f, t
    cdef uint64_t *m
    if nrows == 0:
        return 0
    if p >= (1 << 63):
        from ._kernels_py import rank_mod as slow
        return slow(rows, p)
    P = p
    ncols = len(rows[0])
    m = <uint64_t *> malloc(nrows * ncols * sizeof(uint64_t))
    if m == NULL:
        raise MemoryError()
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                m[i * ncols + j] = <uint64_t>(row[j] % p)
        with nogil:
            r = 0
            for c in range(ncols):
                if r >= nrows:
                    break
                piv = -1
                for i in range(r, nrows):
                    if m[i * ncols + c]:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != r:
                    for j in range(ncols):
                        t = m[r * ncols + j]
                        m[r * ncols + j] = m[piv * ncols + j]
                        m[piv * ncols + j] = t
                inv = powmod(m[r * ncols + c], P - 2, P)
                for j in range(c, ncols):
                    m[r * ncols + j] = mulmod(m[r * ncols + j], inv, P)
                for i in range(r + 1, nrows):
                    f = m[i * ncols + c]
                    if f:
                        for j in range(c, ncols):
                            t = mulmod(f, m[r * ncols + j], P)
                            m[i * ncols + j] = (m[i * ncols + j] + P - t) % P
                r += 1
        return r
    finally:
        free(m)


def independent_rows_mod(rows, p):
    """Indices of a greedy maximal independent subset of ``rows`` mod ``p``."""
    cdef Py_ssize_t nrows = len(rows), ncols, i, j, k, nb = 0, piv
    cdef uint64_t P, f, t, inv
    cdef uint64_t *basis
    cdef uint64_t *row
    cdef Py_ssize_t *pivots
    if nrows == 0:
        return []
    if p >= (1 << 63):
        from ._kernels_py import independent_rows_mod as slow
        return slow(rows, p)
    P = p
    ncols = len(rows[0])
    basis = <uint64_t *> malloc((ncols + 1) * ncols * sizeof(uint64_t))
    row = <uint64_t *> malloc(ncols * sizeof(uint64_t))
    pivots = <Py_ssize_t *> malloc((ncols + 1) * sizeof(Py_ssize_t))
    if basis == NULL or row == NULL or pivots == NULL:
        free(basis); free(row); free(pivots)
        raise MemoryError()
    keep = []
    try:
        for i in range(nrows):
            if nb >= ncols:
                break
            src = rows[i]
            for j in range(ncols):
                row[j] = <uint64_t>(src[j] % p)
            with nogil:
                for k in range(nb):
                    f = row[pivots[k]]
                    if f:
                        for j in range(ncols):
                            if basis[k * ncols + j]:
                                t = mulmod(f, basis[k * ncols + j], P)
                                row[j] = (row[j] + P - t) % P
                piv = -1
                for j in range(ncols):
                    if row[j]:
                        piv = j
                        break
                if piv >= 0:
                    inv = powmod(row[piv], P - 2, P)
                    for j in range(ncols):
                        row[j] = mulmod(row[j], inv, P)
                    for k in range(nb):
                        f = basis[k * ncols + piv]
                        if f:
                            for j in range(ncols):
                                t = mulmod(f, row[j], P)
                                basis[k * ncols + j] = (basis[k * ncols + j] + P - t) % P
                    for j in range(ncols):
                        basis[nb * ncols + j] = row[j]
                    pivots[nb] = piv
                    nb += 1
            if piv >= 0:
                keep.append(i)
        return keep
    finally:
        free(basis); free(row); free(pivots)
